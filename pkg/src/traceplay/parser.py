"""Line-level parser for the flag-tagged "newtrace" grammar."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .model import Action, Address, Layer, NO_LAYER, ProtocolProps, TraceEvent


@dataclass(frozen=True)
class Skipped:
    """A line that produced no event, with the reason it was skipped.

    ``malformed`` marks broken event lines (leading s/r/f/d with unusable
    mandatory fields) as opposed to lines that are not events at all.
    """

    line_no: int
    reason: str
    malformed: bool = False


ParsedLine = Union[TraceEvent, Skipped]

_MAC_TAGS = ("Ma", "Md", "Ms", "Mt")


def _is_tag(token: str) -> bool:
    return len(token) >= 2 and token[0] == "-" and token[1].isalpha()


def parse_line(raw: str, line_no: int, next_event_index: int) -> ParsedLine:
    """Parse one line (without terminator) into an event or a skip record.

    Grammar: a leading action letter followed by `-<Tag> <value>` pairs.
    A trailing `-P <name>` opens the protocol tail; inside it every
    `-P<suffix> <value>` pair is kept under the `P<suffix>` key. Unknown
    tags outside the tail are retained in the extras map. Never raises on
    malformed input.
    """
    text = raw.strip()
    if not text:
        return Skipped(line_no, "blank")
    if text.startswith("#"):
        return Skipped(line_no, "comment")
    tokens = text.split()
    head = tokens[0]
    if head in ("M", "N", "V"):
        return Skipped(line_no, "old-format")
    action = Action.from_letter(head)
    if action is None:
        return Skipped(line_no, f"unrecognized leading token {head!r}")

    time: float | None = None
    node_id: int | None = None
    hop_src: int | None = None
    hop_dst: int | None = None
    x: float | None = None
    y: float | None = None
    z: float | None = None
    energy: float | None = None
    layer = NO_LAYER
    drop_reason: str | None = None
    mac: dict[str, str] = {}
    ip_src: Address | None = None
    ip_dst: Address | None = None
    pkt_type: str | None = None
    pkt_size: int | None = None
    flow_id: int | None = None
    unique_id: int | None = None
    hop_count: int | None = None
    extras: list[tuple[str, str]] = []
    proto_name: str | None = None
    proto_entries: list[tuple[str, str]] = []
    saw_tag = False

    i = 1
    n = len(tokens)
    while i < n:
        token = tokens[i]
        if not _is_tag(token):
            i += 1  # stray value token: tolerated noise
            continue
        saw_tag = True
        tag = token[1:]
        value: str | None = None
        if i + 1 < n and not _is_tag(tokens[i + 1]):
            value = tokens[i + 1]
            i += 2
        else:
            i += 1
        if proto_name is not None and tag != "P" and tag.startswith("P"):
            proto_entries.append((tag, value or ""))
            continue
        if tag == "P":
            if value is not None and proto_name is None:
                proto_name = value.lower()
            else:
                extras.append((tag, value or ""))
            continue
        if value is None:
            extras.append((tag, ""))
            continue
        try:
            if tag == "t":
                time = float(value)
            elif tag == "Ni":
                node_id = int(value)
            elif tag == "Hs":
                hop_src = int(value)
            elif tag == "Hd":
                hop_dst = int(value)
            elif tag == "Nx":
                x = float(value)
            elif tag == "Ny":
                y = float(value)
            elif tag == "Nz":
                z = float(value)
            elif tag == "Ne":
                energy = float(value)
            elif tag == "Nl":
                layer = Layer.parse(value)
            elif tag == "Nw":
                drop_reason = value
            elif tag in _MAC_TAGS:
                mac[tag] = value
            elif tag == "Is":
                ip_src = Address.parse(value)
            elif tag == "Id":
                ip_dst = Address.parse(value)
            elif tag == "It":
                pkt_type = value
            elif tag == "Il":
                size = int(value)
                if size < 0:
                    raise ValueError(value)
                pkt_size = size
            elif tag == "If":
                flow_id = int(value)
            elif tag == "Ii":
                unique_id = int(value)
            elif tag == "Ih":
                hop_count = int(value)
            else:
                extras.append((tag, value))
        except ValueError:
            extras.append((tag, value))  # unusable value, kept verbatim

    if time is None:
        if not saw_tag:
            return Skipped(line_no, "old-format")
        return Skipped(line_no, "missing or invalid -t", malformed=True)
    if node_id is None or node_id < 0:
        return Skipped(line_no, "missing or invalid -Ni", malformed=True)

    pos: tuple[float, float, float] | None = None
    if x is not None and y is not None:
        pos = (x, y, z if z is not None else 0.0)
    mac_fields: tuple[str, str, str, str] | None = None
    if mac:
        mac_fields = tuple(mac.get(tag, "") for tag in _MAC_TAGS)  # type: ignore[assignment]
    proto = None
    if proto_name is not None:
        proto = ProtocolProps(proto_name, tuple(proto_entries))

    return TraceEvent(
        event_index=next_event_index,
        line_no=line_no,
        action=action,
        time=time,
        node_id=node_id,
        pos=pos,
        layer=layer,
        hop_src=hop_src,
        hop_dst=hop_dst,
        energy=energy,
        drop_reason=drop_reason,
        mac_fields=mac_fields,
        ip_src=ip_src,
        ip_dst=ip_dst,
        pkt_type=pkt_type,
        pkt_size=pkt_size,
        flow_id=flow_id,
        unique_id=unique_id,
        hop_count=hop_count,
        proto=proto,
        extras=tuple(extras),
    )


def detect_protocol(events: Iterable[TraceEvent], limit: int | None = None) -> str | None:
    """First protocol name carried by a routing-layer event, lowercased.

    Returns None when no scanned event has a protocol tail on the RTR
    layer. ``limit`` bounds how many events are scanned (default: all).
    """
    for seen, event in enumerate(events):
        if limit is not None and seen >= limit:
            break
        if event.proto is not None and event.layer.is_routing:
            return event.proto.name
    return None
