from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from traceplay import (
    Action,
    Address,
    AgentClass,
    Layer,
    LayerKind,
    ProtocolProps,
    TraceEvent,
    classify_agent_packet,
    format_event,
    parse_line,
)


def test_action_letters():
    assert Action.from_letter("s") is Action.SEND
    assert Action.from_letter("r") is Action.RECEIVE
    assert Action.from_letter("f") is Action.FORWARD
    assert Action.from_letter("d") is Action.DROP
    assert Action.from_letter("x") is None
    assert Action.from_letter("M") is None


def test_layer_known_and_other():
    assert Layer.parse("AGT").kind is LayerKind.AGT
    assert Layer.parse("RTR").is_routing
    assert Layer.parse("IFQ").kind is LayerKind.IFQ
    weird = Layer.parse("PHY")
    assert weird.kind is LayerKind.OTHER
    assert weird.raw == "PHY"
    assert str(weird) == "PHY"


@pytest.mark.parametrize("token", ["0.255", "-1.255", "-2.0", "39.1"])
def test_address_round_trip(token):
    assert str(Address.parse(token)) == token


def test_address_broadcast_flag():
    assert Address.parse("-1.255").is_broadcast
    assert Address.parse("-2.255").is_broadcast
    assert not Address.parse("0.255").is_broadcast


def test_address_rejects_garbage():
    with pytest.raises(ValueError):
        Address.parse("7")
    with pytest.raises(ValueError):
        Address.parse("a.b")
    with pytest.raises(ValueError):
        Address.parse("1.-2")


@pytest.mark.parametrize(
    "pkt_type,expected",
    [
        ("cbr", AgentClass.CBR),
        ("CBR", AgentClass.CBR),
        ("tcp", AgentClass.TCP_ACK),
        ("ack", AgentClass.TCP_ACK),
        ("ACK", AgentClass.TCP_ACK),
        ("AODV", AgentClass.OTHER),
        ("message", AgentClass.OTHER),
        (None, AgentClass.OTHER),
    ],
)
def test_classify_agent_packet(pkt_type, expected):
    assert classify_agent_packet(pkt_type) is expected


def test_protocol_props_lookup_preserves_order():
    props = ProtocolProps("aodv", (("Pt", "0x2"), ("Pc", "REQUEST")))
    assert props.get("Pt") == "0x2"
    assert props.get("Prt") is None
    assert list(props.as_dict()) == ["Pt", "Pc"]


def test_broadcast_detection_matches_ip_dst():
    event = parse_line("s -t 1.0 -Ni 0 -Id -1.255", 0, 0)
    assert event.is_broadcast
    event = parse_line("s -t 1.0 -Ni 0 -Id 3.255", 0, 0)
    assert not event.is_broadcast


# -- field-set round trip -----------------------------------------------------

_actions = st.sampled_from(list(Action))
_layers = st.sampled_from(["AGT", "RTR", "MAC", "IFQ", "PHY", "TRP"]).map(Layer.parse)
_floats = st.floats(allow_nan=False, allow_infinity=False, min_value=0, max_value=1e9)
_coords = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6)
_addresses = st.builds(
    Address,
    node_part=st.integers(min_value=-2, max_value=500),
    port_part=st.integers(min_value=0, max_value=500),
)
_word = st.text(alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_", min_size=1, max_size=8)
_proto = st.builds(
    ProtocolProps,
    name=_word.map(str.lower),
    entries=st.lists(
        st.tuples(_word.map(lambda s: "P" + s), _word), min_size=0, max_size=5
    ).map(lambda pairs: tuple(dict(pairs).items())),
)

_events = st.builds(
    TraceEvent,
    event_index=st.just(0),
    line_no=st.just(0),
    action=_actions,
    time=_floats,
    node_id=st.integers(min_value=0, max_value=999),
    pos=st.one_of(st.none(), st.tuples(_coords, _coords, _coords)),
    layer=_layers,
    hop_src=st.one_of(st.none(), st.integers(min_value=-2, max_value=999)),
    hop_dst=st.one_of(st.none(), st.integers(min_value=-2, max_value=999)),
    energy=st.one_of(st.none(), _coords),
    drop_reason=st.one_of(st.none(), st.just("---"), _word),
    mac_fields=st.one_of(st.none(), st.tuples(_word, _word, _word, _word)),
    ip_src=st.one_of(st.none(), _addresses),
    ip_dst=st.one_of(st.none(), _addresses),
    pkt_type=st.one_of(st.none(), st.sampled_from(["cbr", "tcp", "ack", "AODV", "message"])),
    pkt_size=st.one_of(st.none(), st.integers(min_value=0, max_value=100_000)),
    flow_id=st.one_of(st.none(), st.integers(min_value=-1, max_value=1000)),
    unique_id=st.one_of(st.none(), st.integers(min_value=0, max_value=10**9)),
    hop_count=st.one_of(st.none(), st.integers(min_value=0, max_value=64)),
    proto=st.one_of(st.none(), _proto),
    extras=st.just(()),
)


@settings(max_examples=200, deadline=None)
@given(_events)
def test_event_field_set_round_trip(event):
    """Render-to-text then reparse gives a semantically equal event."""
    assert parse_line(format_event(event), 0, 0) == event
