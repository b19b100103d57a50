"""Vocabulary shared by the whole toolchain.

Actions, layers, addresses, protocol property maps and the event record,
exactly as they appear in NS-2 "new wireless trace" lines.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Action(enum.Enum):
    """Leading letter of a trace line: what happened to the packet."""

    SEND = "s"
    RECEIVE = "r"
    FORWARD = "f"
    DROP = "d"

    @classmethod
    def from_letter(cls, letter: str) -> Action | None:
        return _ACTIONS.get(letter)


_ACTIONS = {action.value: action for action in Action}


class LayerKind(enum.Enum):
    AGT = "AGT"
    RTR = "RTR"
    MAC = "MAC"
    IFQ = "IFQ"
    OTHER = "OTHER"


@dataclass(frozen=True)
class Layer:
    """Network level tag (`-Nl`). Unknown tags survive verbatim as OTHER."""

    kind: LayerKind
    raw: str

    @classmethod
    def parse(cls, tag: str) -> Layer:
        try:
            return cls(LayerKind(tag), tag)
        except ValueError:
            return cls(LayerKind.OTHER, tag)

    @property
    def is_routing(self) -> bool:
        return self.kind is LayerKind.RTR

    @property
    def is_agent(self) -> bool:
        return self.kind is LayerKind.AGT

    def __str__(self) -> str:
        return self.raw


AGT = Layer(LayerKind.AGT, "AGT")
RTR = Layer(LayerKind.RTR, "RTR")
MAC = Layer(LayerKind.MAC, "MAC")
IFQ = Layer(LayerKind.IFQ, "IFQ")
NO_LAYER = Layer(LayerKind.OTHER, "")


@dataclass(frozen=True)
class Address:
    """An `a.b` node/port token. A negative node part marks broadcast."""

    node_part: int
    port_part: int = 0

    @classmethod
    def parse(cls, token: str) -> Address:
        node_text, sep, port_text = token.partition(".")
        if not sep:
            raise ValueError(f"address without port: {token!r}")
        node_part = int(node_text)
        port_part = int(port_text)
        if node_part < -2:
            raise ValueError(f"node part below -2: {token!r}")
        if port_part < 0:
            raise ValueError(f"negative port: {token!r}")
        return cls(node_part, port_part)

    @property
    def is_broadcast(self) -> bool:
        return self.node_part < 0

    def __str__(self) -> str:
        return f"{self.node_part}.{self.port_part}"


@dataclass(frozen=True)
class ProtocolProps:
    """Protocol tail of a line: `-P <name>` plus the trailing `-P*` pairs.

    Keys keep the `P` prefix of the trace tags (`Pt`, `Prt`, ...), values
    are verbatim substrings, and the pair order is the line order.
    """

    name: str
    entries: tuple[tuple[str, str], ...] = ()

    def get(self, tag: str, default: str | None = None) -> str | None:
        for key, value in self.entries:
            if key == tag:
                return value
        return default

    def as_dict(self) -> dict[str, str]:
        return dict(self.entries)


class AgentClass(enum.Enum):
    """Traffic buckets for the agent-layer byte breakdown."""

    CBR = "cbr"
    TCP_ACK = "tcp_ack"
    OTHER = "other"


def classify_agent_packet(pkt_type: str | None) -> AgentClass:
    """Bucket an agent packet type; comparison is case-insensitive."""
    if pkt_type is None:
        return AgentClass.OTHER
    lowered = pkt_type.lower()
    if lowered == "cbr":
        return AgentClass.CBR
    if lowered in ("tcp", "ack"):
        return AgentClass.TCP_ACK
    return AgentClass.OTHER


@dataclass(frozen=True)
class TraceEvent:
    """One parsed trace line; field names follow the tags they come from.

    `event_index` is the 0-based ordinal over event lines, `line_no` the
    0-based ordinal over all file lines. Optional tags missing from the
    line are None; unknown pairs outside the protocol tail land in
    `extras` in line order.
    """

    event_index: int
    line_no: int
    action: Action
    time: float
    node_id: int
    pos: tuple[float, float, float] | None = None
    layer: Layer = NO_LAYER
    hop_src: int | None = None
    hop_dst: int | None = None
    energy: float | None = None
    drop_reason: str | None = None
    mac_fields: tuple[str, str, str, str] | None = None
    ip_src: Address | None = None
    ip_dst: Address | None = None
    pkt_type: str | None = None
    pkt_size: int | None = None
    flow_id: int | None = None
    unique_id: int | None = None
    hop_count: int | None = None
    proto: ProtocolProps | None = None
    extras: tuple[tuple[str, str], ...] = ()

    @property
    def is_broadcast(self) -> bool:
        """True when the destination address has a negative node part."""
        return self.ip_dst is not None and self.ip_dst.is_broadcast

    @property
    def broadcast_next_hop(self) -> bool:
        """True when `-Hd` is missing or negative (broadcast/undetermined)."""
        return self.hop_dst is None or self.hop_dst < 0


_MAC_TAGS = ("Ma", "Md", "Ms", "Mt")


def format_event(event: TraceEvent) -> str:
    """Render an event back to a trace line.

    Whitespace is normalized; the field set round-trips through
    ``trace_parser.parse_line`` to an equal value. Floats are written with
    ``repr`` so they reparse exactly.
    """
    parts = [event.action.value, "-t", repr(event.time)]
    if event.hop_src is not None:
        parts += ["-Hs", str(event.hop_src)]
    if event.hop_dst is not None:
        parts += ["-Hd", str(event.hop_dst)]
    parts += ["-Ni", str(event.node_id)]
    if event.pos is not None:
        x, y, z = event.pos
        parts += ["-Nx", repr(x), "-Ny", repr(y), "-Nz", repr(z)]
    if event.energy is not None:
        parts += ["-Ne", repr(event.energy)]
    if event.layer.raw:
        parts += ["-Nl", event.layer.raw]
    if event.drop_reason is not None:
        parts += ["-Nw", event.drop_reason]
    if event.mac_fields is not None:
        for tag, value in zip(_MAC_TAGS, event.mac_fields):
            if value:
                parts += [f"-{tag}", value]
    if event.ip_src is not None:
        parts += ["-Is", str(event.ip_src)]
    if event.ip_dst is not None:
        parts += ["-Id", str(event.ip_dst)]
    if event.pkt_type is not None:
        parts += ["-It", event.pkt_type]
    if event.pkt_size is not None:
        parts += ["-Il", str(event.pkt_size)]
    if event.flow_id is not None:
        parts += ["-If", str(event.flow_id)]
    if event.unique_id is not None:
        parts += ["-Ii", str(event.unique_id)]
    if event.hop_count is not None:
        parts += ["-Ih", str(event.hop_count)]
    for tag, value in event.extras:
        parts.append(f"-{tag}")
        if value:
            parts.append(value)
    if event.proto is not None:
        parts += ["-P", event.proto.name]
        for tag, value in event.proto.entries:
            parts.append(f"-{tag}")
            if value:
                parts.append(value)
    return " ".join(parts)
