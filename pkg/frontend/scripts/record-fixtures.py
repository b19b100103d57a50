"""Record real API responses into JSON fixtures for the frontend tests.

Builds a small deterministic trace (13 nodes; node 11 receives a routing
packet from node 6 carrying a routing-table dump with a route to 19 via
1), serves it with the in-process HTTP app, and saves every payload the
browser tests replay. Run from the repo root:

    python3 frontend/scripts/record-fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "tests"))

from fastapi.testclient import TestClient

from oracles import format_trace_line
from traceplay.server import create_app

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"

GRID = {i: (100.0 + (i % 4) * 250.0, 100.0 + (i // 4) * 250.0) for i in range(13)}

AODV_BASE = (("Pt", "0x2"), ("Ph", "1"), ("Pb", "1"), ("Pd", "8"),
             ("Pds", "0"), ("Ps", "7"), ("Pss", "4"), ("Pc", "REQUEST"))


def build_trace(path: Path) -> None:
    lines = []
    t = 0.0

    def emit(action, node, **kwargs):
        nonlocal t
        t += 0.05
        x, y = GRID[node]
        lines.append(format_trace_line(action, t, node, x, y, **kwargs))

    for i in range(13):  # settle every node with an AODV hello
        emit("s", i, hop_src=i, hop_dst=-1, layer="RTR",
             ip_src=f"{i}.255", ip_dst="-1.255", pkt_type="AODV", pkt_size=44,
             unique_id=i, proto="aodv",
             proto_pairs=(("Pt", "0x10"), ("Ph", "0"), ("Pc", "HELLO")))
    # 13: node 6 floods a route request
    emit("s", 6, hop_src=6, hop_dst=-1, layer="RTR",
         ip_src="6.255", ip_dst="-1.255", pkt_type="AODV", pkt_size=48,
         unique_id=13, proto="aodv", proto_pairs=AODV_BASE)
    # 14: node 11 receives it and dumps its routing table
    emit("r", 11, hop_src=6, hop_dst=11, layer="RTR",
         ip_src="6.255", ip_dst="-1.255", pkt_type="AODV", pkt_size=48,
         unique_id=13, proto="aodv",
         proto_pairs=AODV_BASE + (("Prt", "(19,5,2,1)(8,0,255,0)"),))
    # 15-16: a CBR exchange
    emit("s", 11, hop_src=11, hop_dst=3, layer="AGT",
         ip_src="11.0", ip_dst="3.0", pkt_type="cbr", pkt_size=512, flow_id=1, unique_id=14)
    emit("r", 3, hop_src=11, hop_dst=3, layer="AGT",
         ip_src="11.0", ip_dst="3.0", pkt_type="cbr", pkt_size=512, flow_id=1, unique_id=14)
    # 17: tcp, 18: a routing drop
    emit("s", 5, hop_src=5, hop_dst=9, layer="AGT",
         ip_src="5.0", ip_dst="9.0", pkt_type="tcp", pkt_size=1040, flow_id=2, unique_id=15)
    emit("d", 2, hop_src=7, hop_dst=2, layer="RTR", drop_reason="NRTE",
         ip_src="7.0", ip_dst="2.0", pkt_type="AODV", pkt_size=48, unique_id=16)
    # 19-29: forwards, acks and more table updates
    emit("f", 7, hop_src=6, hop_dst=8, layer="RTR",
         ip_src="6.255", ip_dst="8.255", pkt_type="AODV", pkt_size=48,
         unique_id=17, proto="aodv", proto_pairs=AODV_BASE)
    emit("r", 8, hop_src=7, hop_dst=8, layer="RTR",
         ip_src="6.255", ip_dst="8.255", pkt_type="AODV", pkt_size=48,
         unique_id=17, proto="aodv", proto_pairs=AODV_BASE)
    emit("s", 9, hop_src=9, hop_dst=5, layer="AGT",
         ip_src="9.0", ip_dst="5.0", pkt_type="ack", pkt_size=40, flow_id=2, unique_id=18)
    emit("r", 5, hop_src=9, hop_dst=5, layer="AGT",
         ip_src="9.0", ip_dst="5.0", pkt_type="ack", pkt_size=40, flow_id=2, unique_id=18)
    for i, node in enumerate((0, 1, 4, 10, 12, 6)):
        emit("s", node, hop_src=node, hop_dst=-1, layer="RTR",
             ip_src=f"{node}.255", ip_dst="-1.255", pkt_type="AODV", pkt_size=44,
             unique_id=19 + i, proto="aodv",
             proto_pairs=(("Pt", "0x10"), ("Ph", "0"), ("Pc", "HELLO")))
    # 29: node 11 refreshes its table (last event)
    emit("r", 11, hop_src=6, hop_dst=11, layer="RTR",
         ip_src="6.255", ip_dst="-1.255", pkt_type="AODV", pkt_size=48,
         unique_id=25, proto="aodv",
         proto_pairs=AODV_BASE + (("Prt", "(19,5,2,1)(8,0,255,0)(6,7,1,6)"),))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    trace = FIXTURES / "walkthrough.tr"
    build_trace(trace)

    app = create_app(trace.parent, open_path=trace)
    client = TestClient(app)
    session = client.get("/sessions").json()["sessions"][0]
    sid = session["id"]
    session["id"] = "fixture"  # stable id for the tests
    total = session["total_events"]

    def fetch(path: str):
        response = client.get(path)
        assert response.status_code == 200, (path, response.status_code)
        return response.json()

    states = [fetch(f"/sessions/{sid}/state/{k}") for k in range(-1, total)]
    events = [fetch(f"/sessions/{sid}/events/{k}") for k in range(total)]
    partitions = {
        f"{k}:{rng}": fetch(f"/sessions/{sid}/partitions/{k}?range={rng}")
        for k in range(-1, total)
        for rng in (250, 120)
    }
    notify = {}
    for k in range(-1, total):
        for node in (0, 3, 6, 11):
            body = {"kind": "node_clicked", "event_index": k, "node_id": node}
            response = client.post(f"/sessions/{sid}/notify", json=body)
            assert response.status_code == 200
            notify[f"node_clicked:{k}:{node}"] = response.json()
        if k >= 0:
            body = {"kind": "transmission_clicked", "event_index": k}
            response = client.post(f"/sessions/{sid}/notify", json=body)
            assert response.status_code == 200
            notify[f"transmission_clicked:{k}"] = response.json()

    (FIXTURES / "session.json").write_text(json.dumps(session, indent=1))
    (FIXTURES / "states.json").write_text(json.dumps(states))
    (FIXTURES / "events.json").write_text(json.dumps(events))
    (FIXTURES / "partitions.json").write_text(json.dumps(partitions))
    (FIXTURES / "notify.json").write_text(json.dumps(notify))
    for k, rng in ((14, 250), (29, None)):
        query = f"?range={rng}" if rng is not None else ""
        response = client.get(f"/sessions/{sid}/screenshot/{k}.png{query}")
        assert response.status_code == 200
        name = f"screenshot_{k}_{rng if rng is not None else 'none'}.png"
        (FIXTURES / name).write_bytes(response.content)

    route_rows = notify["node_clicked:14:11"]["panel"]
    assert any("dest 19" in value for _, value in route_rows), route_rows
    print(f"recorded fixtures for {total} events into {FIXTURES}")


if __name__ == "__main__":
    main()
