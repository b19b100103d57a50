"""Protocol extension mechanism: the handler contract, a registry with a
generic fallback, and the AODV handler with routing-table introspection.

Extensions own only the node's ``extension_payload`` and the protocol
panel content. Positions, counters and settlement are engine business and
replay identically under any handler.
"""

from __future__ import annotations

import copy
import enum
import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .errors import RangeError
from .state import MobileNode

log = logging.getLogger(__name__)

PanelRows = list[tuple[str, str]]


class VisualEventKind(enum.Enum):
    NODE_CLICKED = "node_clicked"
    TRANSMISSION_CLICKED = "transmission_clicked"
    EVENT_CHANGED = "event_changed"


@dataclass(frozen=True)
class VisualEvent:
    kind: VisualEventKind
    event_index: int
    node_id: int | None = None


class VisualizerView:
    """Narrow read-only service handle passed to extensions.

    Gives access to published snapshots, events and preferences; never to
    replay internals. Extensions must not mutate what they read here.
    """

    def __init__(self, engine, prefs=None):
        self._engine = engine
        self._prefs = prefs

    def state_at(self, k: int):
        return self._engine.state_at(k)

    def event_at(self, k: int):
        return self._engine.event_at(k)

    @property
    def total_events(self) -> int:
        return self._engine.total_events

    @property
    def prefs(self):
        return self._prefs


class ProtocolExtension(ABC):
    """Contract every protocol handler implements.

    Five operations: name, create_node, update_node, copy_node,
    notify_event. ``copy_node`` must produce a fully independent copy;
    ``update_node`` must be deterministic in (node, properties, index).
    """

    @abstractmethod
    def name(self) -> str: ...

    @abstractmethod
    def create_node(self, address: int, x: float, y: float, properties: Mapping[str, str]) -> MobileNode: ...

    @abstractmethod
    def update_node(self, node: MobileNode, properties: Mapping[str, str], event_index: int) -> MobileNode: ...

    @abstractmethod
    def copy_node(self, node: MobileNode) -> MobileNode: ...

    @abstractmethod
    def notify_event(self, event: VisualEvent, view: VisualizerView) -> PanelRows: ...


@dataclass
class GenericBookkeeping:
    """What the fallback handler remembers per node: the raw property pairs."""

    last_properties: dict[str, str] = field(default_factory=dict)
    last_event_index: int | None = None


class DummyExtension(ProtocolExtension):
    """Naive handler: keeps raw tag/value pairs and renders them verbatim."""

    def name(self) -> str:
        return "dummy"

    def create_node(self, address, x, y, properties) -> MobileNode:
        return MobileNode(node_id=address, pos=(x, y, 0.0))

    def update_node(self, node, properties, event_index) -> MobileNode:
        if properties:
            node.extension_payload = GenericBookkeeping(dict(properties), event_index)
        return node

    def copy_node(self, node) -> MobileNode:
        copied = node.copy_core()
        copied.extension_payload = copy.deepcopy(node.extension_payload)
        return copied

    def notify_event(self, event, view) -> PanelRows:
        if event.kind is VisualEventKind.NODE_CLICKED:
            state = view.state_at(event.event_index)
            node = state.nodes.get(event.node_id)
            if node is None:
                raise RangeError(f"unknown node id {event.node_id}")
            payload = node.extension_payload
            if isinstance(payload, GenericBookkeeping):
                return list(payload.last_properties.items())
            return []
        trace_event = view.event_at(event.event_index)
        if trace_event.proto is None:
            return []
        return list(trace_event.proto.entries)


@dataclass(frozen=True)
class AodvRouteEntry:
    """One `-Prt` tuple: (destination, sequence number, hop count, next hop)."""

    destination: int
    sequence_number: int
    hop_count: int
    next_hop: int

    def panel_label(self) -> str:
        return (
            f"dest {self.destination}, seq {self.sequence_number}, "
            f"{self.hop_count} hops, next hop {self.next_hop}"
        )


@dataclass
class AodvNodeData:
    """AODV payload: the node's last exported routing table."""

    routing_table: list[AodvRouteEntry] = field(default_factory=list)


_TUPLE_RE = re.compile(r"\(([^()]*)\)")

# Packet-view rows in display order: (trace tag, panel label).
_PACKET_VIEW = (
    ("Pc", "Type"),
    ("Ph", "Hop count"),
    ("Pb", "Broadcast id"),
    ("Pd", "Destination"),
    ("Pds", "Destination seq"),
    ("Ps", "Source"),
    ("Pss", "Source seq"),
    ("Pt", "Type code"),
)


def parse_route_table(text: str) -> tuple[list[AodvRouteEntry], list[str]]:
    """Parse `(d,s,h,n)(...)` routing-table text.

    Malformed tuples are skipped with a diagnostic, the rest are kept.
    Later tuples win over earlier ones with the same destination.
    """
    deduped: dict[int, AodvRouteEntry] = {}
    problems: list[str] = []
    for match in _TUPLE_RE.finditer(text):
        parts = match.group(1).split(",")
        try:
            if len(parts) != 4:
                raise ValueError(f"expected 4 fields, got {len(parts)}")
            destination, seq, hops, next_hop = (int(part) for part in parts)
        except ValueError as exc:
            problems.append(f"bad routing tuple ({match.group(1)}): {exc}")
            continue
        deduped[destination] = AodvRouteEntry(destination, seq, hops, next_hop)
    return list(deduped.values()), problems


def aodv_packet_view(properties: Mapping[str, str]) -> PanelRows:
    """Packet rows from the `-P*` pairs, raw type code shown uninterpreted."""
    return [(label, properties[tag]) for tag, label in _PACKET_VIEW if tag in properties]


class AodvExtension(DummyExtension):
    """AODV handler: decodes packet fields and the `-Prt` routing-table dump."""

    def name(self) -> str:
        return "aodv"

    def update_node(self, node, properties, event_index) -> MobileNode:
        table_text = properties.get("Prt")
        if table_text is not None:
            entries, problems = parse_route_table(table_text)
            for problem in problems:
                log.warning("event %d node %d: %s", event_index, node.node_id, problem)
            node.extension_payload = AodvNodeData(entries)
        return node

    def copy_node(self, node) -> MobileNode:
        copied = node.copy_core()
        payload = node.extension_payload
        if isinstance(payload, AodvNodeData):
            copied.extension_payload = AodvNodeData(list(payload.routing_table))
        else:
            copied.extension_payload = copy.deepcopy(payload)
        return copied

    def notify_event(self, event, view) -> PanelRows:
        if event.kind is VisualEventKind.NODE_CLICKED:
            state = view.state_at(event.event_index)
            node = state.nodes.get(event.node_id)
            if node is None:
                raise RangeError(f"unknown node id {event.node_id}")
            payload = node.extension_payload
            if not isinstance(payload, AodvNodeData) or not payload.routing_table:
                return []
            return [
                (f"Route {i}", entry.panel_label())
                for i, entry in enumerate(payload.routing_table)
            ]
        trace_event = view.event_at(event.event_index)
        if trace_event.proto is None or trace_event.proto.name != "aodv":
            return []
        return aodv_packet_view(trace_event.proto.as_dict())


@dataclass(frozen=True)
class ResolvedExtension:
    extension: ProtocolExtension
    notice: str | None = None


_registry: dict[str, Callable[[], ProtocolExtension]] = {}


def register_extension(name: str, factory: Callable[[], ProtocolExtension]) -> None:
    """Make a handler resolvable by protocol name (case-insensitive)."""
    _registry[name.lower()] = factory


def registry_resolve(name: str | None) -> ResolvedExtension:
    """Always returns a handler; unknown protocols get the generic one
    plus a notice for the UI."""
    if name:
        factory = _registry.get(name.lower())
        if factory is not None:
            return ResolvedExtension(factory())
        notice = f"protocol {name!r} has no registered handler; visualized with generic handler"
    else:
        notice = "no routing protocol detected; visualized with generic handler"
    return ResolvedExtension(DummyExtension(), notice)


register_extension("aodv", AodvExtension)
