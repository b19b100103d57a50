"""The network model: per-node state array, sequential event application,
byte counters, and the projections behind the property panels."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from .errors import RangeError, SequenceError, StateError
from .model import Action, Address, AgentClass, Layer, LayerKind, TraceEvent, classify_agent_packet
from .styles import ArrowStyle, arrow_style

if TYPE_CHECKING:
    from .extensions import ProtocolExtension
    from .index import PreScan

log = logging.getLogger(__name__)

_ACTION_FIELD = {
    Action.SEND: "sent_bytes",
    Action.RECEIVE: "received_bytes",
    Action.FORWARD: "forwarded_bytes",
    Action.DROP: "dropped_bytes",
}


def zero_breakdown() -> dict[AgentClass, int]:
    return {bucket: 0 for bucket in AgentClass}


@dataclass
class CounterSet:
    """Byte counters for one layer, split by what happened to the packet."""

    sent_bytes: int = 0
    received_bytes: int = 0
    forwarded_bytes: int = 0
    dropped_bytes: int = 0

    def add(self, action: Action, nbytes: int) -> None:
        name = _ACTION_FIELD[action]
        setattr(self, name, getattr(self, name) + nbytes)

    def copy(self) -> CounterSet:
        return CounterSet(self.sent_bytes, self.received_bytes, self.forwarded_bytes, self.dropped_bytes)

    def as_dict(self) -> dict[str, int]:
        return {
            "sent": self.sent_bytes,
            "received": self.received_bytes,
            "forwarded": self.forwarded_bytes,
            "dropped": self.dropped_bytes,
        }


@dataclass
class MobileNode:
    """Last-known state of one node plus its cumulative counters.

    ``extension_payload`` belongs to the protocol extension; every other
    field is owned by the engine and must look the same under any
    extension.
    """

    node_id: int
    pos: tuple[float, float, float] = (0.0, 0.0, 0.0)
    settled: bool = False
    last_update_event: int | None = None
    network_address: Address | None = None
    routing: CounterSet = field(default_factory=CounterSet)
    agent: CounterSet = field(default_factory=CounterSet)
    agent_breakdown: dict[AgentClass, int] = field(default_factory=zero_breakdown)
    extension_payload: Any = None

    def copy_core(self) -> MobileNode:
        """Copy every engine-owned field; the payload is carried by reference.

        Extensions call this from ``copy_node`` and then duplicate the
        payload themselves.
        """
        return MobileNode(
            node_id=self.node_id,
            pos=self.pos,
            settled=self.settled,
            last_update_event=self.last_update_event,
            network_address=self.network_address,
            routing=self.routing.copy(),
            agent=self.agent.copy(),
            agent_breakdown=dict(self.agent_breakdown),
            extension_payload=self.extension_payload,
        )


@dataclass
class NetworkState:
    """Whole-network value after applying events 0..event_index (-1 = initial).

    Published states are value snapshots: once handed out they are never
    mutated by further replay. Network counters always equal the sum of
    the matching per-node counters.
    """

    event_index: int
    nodes: dict[int, MobileNode]
    network_routing: CounterSet = field(default_factory=CounterSet)
    network_agent: CounterSet = field(default_factory=CounterSet)
    network_agent_breakdown: dict[AgentClass, int] = field(default_factory=zero_breakdown)


def copy_state(state: NetworkState, ext: ProtocolExtension) -> NetworkState:
    """Deep copy through the extension so payloads duplicate correctly."""
    return NetworkState(
        event_index=state.event_index,
        nodes={node_id: ext.copy_node(node) for node_id, node in state.nodes.items()},
        network_routing=state.network_routing.copy(),
        network_agent=state.network_agent.copy(),
        network_agent_breakdown=dict(state.network_agent_breakdown),
    )


def initial_state(
    prescan: PreScan,
    ext: ProtocolExtension,
    diagnostics: list[str] | None = None,
) -> NetworkState:
    """Early-positioned state before any event: every node unsettled at the
    position of its first related event, all counters zero."""
    nodes: dict[int, MobileNode] = {}
    for node_id in prescan.node_ids:
        x, y = prescan.first_position.get(node_id, (0.0, 0.0))
        try:
            node = ext.create_node(node_id, x, y, {})
        except Exception as exc:  # a broken extension must not sink the session
            message = f"extension {ext.name()!r} failed to create node {node_id}: {exc}"
            log.warning(message)
            if diagnostics is not None:
                diagnostics.append(message)
            node = MobileNode(node_id=node_id, pos=(x, y, 0.0))
        nodes[node_id] = node
    return NetworkState(event_index=-1, nodes=nodes)


def apply_event(state: NetworkState, event: TraceEvent, ext: ProtocolExtension) -> NetworkState:
    """Apply the next event in sequence, mutating ``state`` and returning it.

    The caller owns the state being advanced; anything published to other
    consumers must be a copy (see ``copy_state``). Only AGT/RTR events
    touch counters; every event moves and settles its node.
    """
    if event.event_index != state.event_index + 1:
        raise SequenceError(
            f"event {event.event_index} applied to state at {state.event_index}"
        )
    node = state.nodes.get(event.node_id)
    if node is None:
        raise StateError(f"event {event.event_index} names node {event.node_id} absent from the pre-scan")

    if event.pos is not None:
        node.pos = event.pos
    node.settled = True
    node.last_update_event = event.event_index
    if (
        node.network_address is None
        and event.ip_src is not None
        and event.ip_src.node_part == event.node_id
    ):
        node.network_address = event.ip_src

    kind = event.layer.kind
    if kind is LayerKind.RTR or kind is LayerKind.AGT:
        size = event.pkt_size or 0
        if kind is LayerKind.RTR:
            node.routing.add(event.action, size)
            state.network_routing.add(event.action, size)
        else:
            node.agent.add(event.action, size)
            state.network_agent.add(event.action, size)
            bucket = classify_agent_packet(event.pkt_type)
            node.agent_breakdown[bucket] += size
            state.network_agent_breakdown[bucket] += size

    properties = event.proto.as_dict() if event.proto is not None else {}
    updated = ext.update_node(node, properties, event.event_index)
    if updated is not None and updated is not node:
        state.nodes[event.node_id] = updated
    state.event_index = event.event_index
    return state


@dataclass(frozen=True)
class TransmissionProps:
    """Pure projection of one event for the transmission panel."""

    direction: Action
    layer: Layer
    flow_id: int | None
    ip_src: Address | None
    ip_dst: Address | None
    current_hop: int | None
    next_hop: int | None
    pkt_size: int | None
    pkt_type: str | None
    style: ArrowStyle | None

    @property
    def next_hop_label(self) -> str:
        if self.next_hop is None or self.next_hop < 0:
            return "broadcast"
        return str(self.next_hop)

    def panel_rows(self) -> list[tuple[str, str]]:
        return [
            ("Direction", self.direction.name.lower()),
            ("Layer", self.layer.raw or "unknown"),
            ("Flow id", _opt(self.flow_id)),
            ("IP source", _opt(self.ip_src)),
            ("IP destination", _opt(self.ip_dst)),
            ("Current hop", _opt(self.current_hop)),
            ("Next hop", self.next_hop_label),
            ("Packet size", _opt(self.pkt_size)),
            ("Packet type", self.pkt_type or "unknown"),
        ]


def _opt(value: Any) -> str:
    return "unknown" if value is None else str(value)


def transmission_properties(event: TraceEvent) -> TransmissionProps:
    return TransmissionProps(
        direction=event.action,
        layer=event.layer,
        flow_id=event.flow_id,
        ip_src=event.ip_src,
        ip_dst=event.ip_dst,
        current_hop=event.hop_src,
        next_hop=event.hop_dst,
        pkt_size=event.pkt_size,
        pkt_type=event.pkt_type,
        style=arrow_style(event.layer, event.action, broadcast=event.broadcast_next_hop),
    )


@dataclass(frozen=True)
class NodeSummary:
    """Node panel content: address, location, counters, last update."""

    node_id: int
    grayed: bool
    address: str | None
    location: tuple[float, float, float]
    last_update_event: int | None
    routing: CounterSet
    agent: CounterSet
    agent_breakdown: dict[AgentClass, int]

    def panel_rows(self) -> list[tuple[str, str]]:
        x, y, z = self.location
        rows = [
            ("Address", self.address or "unknown"),
            ("Location", f"({x:g}, {y:g}, {z:g})"),
            ("Last update", "never" if self.last_update_event is None else str(self.last_update_event)),
            ("Routing bytes", _counter_text(self.routing)),
            ("Agent bytes", _counter_text(self.agent)),
        ]
        for bucket in AgentClass:
            rows.append((f"Agent {bucket.value} bytes", str(self.agent_breakdown[bucket])))
        return rows


def _counter_text(counters: CounterSet) -> str:
    return (
        f"sent {counters.sent_bytes}, received {counters.received_bytes}, "
        f"forwarded {counters.forwarded_bytes}, dropped {counters.dropped_bytes}"
    )


def node_summary(state: NetworkState, node_id: int) -> NodeSummary:
    try:
        node = state.nodes[node_id]
    except KeyError:
        raise RangeError(f"unknown node id {node_id}") from None
    return NodeSummary(
        node_id=node_id,
        grayed=not node.settled,
        address=str(node.network_address) if node.network_address is not None else None,
        location=node.pos,
        last_update_event=node.last_update_event,
        routing=node.routing.copy(),
        agent=node.agent.copy(),
        agent_breakdown=dict(node.agent_breakdown),
    )
