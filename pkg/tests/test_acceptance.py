"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line with its runtime (run with `pytest tests/test_acceptance.py -v -s`).

Reference workload: a generated 40-node, 1000x1000 m, ~10k-event trace
with AODV-style protocol tails, produced by the independent writer in
``oracles.py``.
"""

from __future__ import annotations

import random
import time
import tracemalloc
from contextlib import contextmanager

import pytest
from PIL import Image

from traceplay import (
    AgentClass,
    AodvExtension,
    AodvRouteEntry,
    Colors,
    DummyExtension,
    FrameSpec,
    MobileNode,
    NetworkState,
    Preferences,
    ReplayEngine,
    Viewport,
    apply_event,
    build_index,
    compute_partitions,
    copy_state,
    initial_state,
    load_prefs,
    parse_line,
    render_frame,
    save_prefs,
)
from traceplay.extensions import parse_route_table

import oracles
from oracles import (
    bfs_partitions,
    byte_level_offsets,
    generate_bulk_trace,
    naive_pairs,
    whole_file_lines,
)
from test_prefs import random_prefs


@contextmanager
def criterion(number: int, description: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\n[criterion {number}] FAIL {description}")
        raise
    elapsed = time.perf_counter() - start
    within = elapsed < budget_seconds
    verdict = "PASS" if within else "FAIL"
    print(f"\n[criterion {number}] {verdict} {description} ({elapsed:.2f}s, budget {budget_seconds:g}s)")
    assert within, f"criterion {number} exceeded its {budget_seconds:g}s budget: {elapsed:.2f}s"


# -- 1. parser golden test ----------------------------------------------------

def test_criterion_1_parser_golden():
    with criterion(1, "parser golden: modified AODV tail and routing tuples", 1.0):
        raw = (
            "s -t 0.267662078 -Hs 7 -Hd -1 -Ni 7 -Nx 512.00 -Ny 404.00 -Nz 0.00 "
            "-Ne -1.000000 -Nl RTR -Nw --- -Ma 0 -Md 0 -Ms 0 -Mt 0 -Is 7.255 -Id -1.255 "
            "-It AODV -Il 48 -If 0 -Ii 4 -Ih 1 "
            "-P aodv -Pt 0x2 -Ph 1 -Pb 1 -Pd 8 -Pds 0 -Ps 7 -Pss 4 -Pc REQUEST "
            "-Prt (8,0,255,0)(1,5,255,0)"
        )
        event = parse_line(raw, 0, 0)
        assert event.proto is not None
        assert event.proto.name == "aodv"
        assert event.proto.entries == (
            ("Pt", "0x2"),
            ("Ph", "1"),
            ("Pb", "1"),
            ("Pd", "8"),
            ("Pds", "0"),
            ("Ps", "7"),
            ("Pss", "4"),
            ("Pc", "REQUEST"),
            ("Prt", "(8,0,255,0)(1,5,255,0)"),
        )
        entries, problems = parse_route_table(event.proto.get("Prt"))
        assert problems == []
        assert entries == [AodvRouteEntry(8, 0, 255, 0), AodvRouteEntry(1, 5, 255, 0)]


# -- 2. replay oracle ---------------------------------------------------------

def test_criterion_2_replay_oracle(reference_trace, reference_index):
    with criterion(2, "replay oracle: 100 random jumps equal sequential replay", 30.0):
        rng = random.Random(2026)
        total = reference_index.total_events
        targets = sorted(rng.randrange(total) for _ in range(100))

        # from-scratch sequential replay, deep copies frozen at each target
        ext = AodvExtension()
        live = initial_state(reference_index.prescan, ext)
        reader = reference_index.open_reader()
        wanted = set(targets)
        expected = {}
        for k in range(max(targets) + 1):
            apply_event(live, parse_line(reader.event_line(k), reference_index.event_line_no(k), k), ext)
            if k in wanted:
                expected[k] = copy_state(live, ext)

        # history A: default cache, shuffled jump order
        engine_a = ReplayEngine(reference_index, AodvExtension())
        shuffled = targets[:]
        rng.shuffle(shuffled)
        for k in shuffled:
            assert engine_a.state_at(k) == expected[k], f"history A diverged at event {k}"
        # history B: tiny cache forcing evictions, ascending then revisits
        engine_b = ReplayEngine(reference_index, AodvExtension(), capacity=4, stride=500)
        for k in targets:
            assert engine_b.state_at(k) == expected[k], f"history B diverged at event {k}"
        for k in rng.sample(targets, 25):
            assert engine_a.state_at(k) == expected[k]
            assert engine_b.state_at(k) == expected[k]


# -- 3. counter conservation --------------------------------------------------

def test_criterion_3_counter_conservation(reference_trace, reference_index):
    with criterion(3, "counters: conservation and brute-force -Il scan agree", 10.0):
        ext = AodvExtension()
        state = initial_state(reference_index.prescan, ext)
        scan = oracles.CounterScan()
        reader = reference_index.open_reader()
        zero = {"sent": 0, "received": 0, "forwarded": 0, "dropped": 0}
        checked = 0
        for k in range(reference_index.total_events):
            raw = reader.event_line(k)
            apply_event(state, parse_line(raw, reference_index.event_line_no(k), k), ext)
            head, pairs = naive_pairs(raw)
            pairs["__head__"] = head
            scan.feed(pairs)
            if k % 100 != 0:
                continue
            checked += 1
            # conservation: network counters equal the per-node sums
            for counter in ("sent_bytes", "received_bytes", "forwarded_bytes", "dropped_bytes"):
                assert getattr(state.network_routing, counter) == sum(
                    getattr(node.routing, counter) for node in state.nodes.values()
                )
                assert getattr(state.network_agent, counter) == sum(
                    getattr(node.agent, counter) for node in state.nodes.values()
                )
            for bucket in AgentClass:
                assert state.network_agent_breakdown[bucket] == sum(
                    node.agent_breakdown[bucket] for node in state.nodes.values()
                )
            # equality with the independent scan
            assert state.network_routing.as_dict() == scan.network_routing
            assert state.network_agent.as_dict() == scan.network_agent
            assert {b.value: v for b, v in state.network_agent_breakdown.items()} == scan.network_breakdown
            for node_id, node in state.nodes.items():
                assert node.routing.as_dict() == scan.node_routing.get(node_id, zero)
                assert node.agent.as_dict() == scan.node_agent.get(node_id, zero)
        assert checked == 100


# -- 4. partition oracle ------------------------------------------------------

def _state_with(positions):
    nodes = {
        node_id: MobileNode(node_id=node_id, pos=(x, y, 0.0), settled=True, last_update_event=0)
        for node_id, (x, y) in positions.items()
    }
    return NetworkState(event_index=0, nodes=nodes)


def test_criterion_4_partition_oracle():
    with criterion(4, "partitions: 200 BFS-oracle instances and 50 refinement pairs", 10.0):
        rng = random.Random(4)
        for _ in range(200):
            count = rng.randint(0, 50)
            positions = {i: (rng.uniform(0, 1000), rng.uniform(0, 1000)) for i in range(count)}
            radius = rng.uniform(0, 500)
            ours = compute_partitions(_state_with(positions), radius)
            assert list(ours.components) == bfs_partitions(positions, radius)
        for _ in range(50):
            count = rng.randint(2, 50)
            positions = {i: (rng.uniform(0, 1000), rng.uniform(0, 1000)) for i in range(count)}
            r1 = rng.uniform(0, 300)
            r2 = r1 + rng.uniform(0.001, 300)
            fine = compute_partitions(_state_with(positions), r1)
            coarse = compute_partitions(_state_with(positions), r2)
            for component in fine.components:
                members = set(component)
                assert any(members <= set(big) for big in coarse.components), (r1, r2)


# -- 5. index correctness and memory bound ------------------------------------

def test_criterion_5_index_and_memory(reference_trace, reference_index, tmp_path):
    with criterion(5, "indexes: byte-level oracle, buffered fetches, 100 MB memory bound", 60.0):
        offsets, file_length = byte_level_offsets(reference_trace)
        assert list(reference_index.offsets) == offsets
        assert reference_index.file_length == file_length

        lines = whole_file_lines(reference_trace)
        event_lines = list(reference_index.event_lines)
        rng = random.Random(5)
        with reference_index.open_reader() as reader:
            for k in (rng.randrange(reference_index.total_events) for _ in range(1000)):
                before = reader.read_count
                assert reader.event_line(k) == lines[event_lines[k]]
                assert reader.read_count - before <= 1  # at most one buffered segment
            k = rng.randrange(reference_index.total_events)
            reader.event_line(k)
            count = reader.read_count
            reader.event_line(k)
            assert reader.read_count == count  # repeat hits the buffer

        big = tmp_path / "big.tr"
        line_count = generate_bulk_trace(big, target_bytes=100 * 1024 * 1024)
        size = big.stat().st_size
        assert size >= 100 * 1024 * 1024
        tracemalloc.start()
        index = build_index(big)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        assert index.total_events == line_count
        # resident data excludes file contents: indexes are ~16 bytes/line
        assert peak < size / 2, f"peak {peak} bytes vs file {size} bytes"
        with index.open_reader() as reader:
            for k in (0, line_count // 2, line_count - 1):
                node = (7 * (k + 1)) % 100
                expected = (
                    f"s -t {k * 0.001:.9f} -Hs {node} -Hd -2 -Ni {node} -Nx {node * 9.5:.2f} "
                    f"-Ny {node * 3.25:.2f} -Nz 0.00 -Ne -1.000000 -Nl RTR -Nw --- "
                    f"-Is {node}.255 -Id -2.255 -It message -Il 32 -If 0 -Ii {k} -Ih 0"
                )
                assert reader.event_line(k) == expected


# -- 6. jump-work bound -------------------------------------------------------

def test_criterion_6_jump_work_bound(reference_trace, reference_index):
    with criterion(6, "jumps: warm stride-500 cache bounds every replay to 500", 10.0):
        ext = AodvExtension()
        engine = ReplayEngine(reference_index, ext, capacity=64, stride=500)
        # warm playback: sequential pass recording stride snapshots
        live = initial_state(reference_index.prescan, ext)
        reader = reference_index.open_reader()
        for k in range(reference_index.total_events):
            apply_event(live, parse_line(reader.event_line(k), reference_index.event_line_no(k), k), ext)
            if k % 500 == 0:
                engine.record_playback_snapshot(k, live)
        rng = random.Random(6)
        for _ in range(100):
            k = rng.randrange(reference_index.total_events)
            before = engine.events_replayed
            engine.state_at(k)
            replayed = engine.events_replayed - before
            assert replayed <= 500, f"jump to {k} replayed {replayed} events"


# -- 7. extension isolation ---------------------------------------------------

def test_criterion_7_extension_isolation(reference_trace, reference_index):
    with criterion(7, "extensions: dummy and AODV replays share identical core state", 20.0):
        dummy_engine = ReplayEngine(reference_index, DummyExtension())
        aodv_engine = ReplayEngine(reference_index, AodvExtension())
        for k in (2500, 7500, reference_index.total_events - 1):
            dummy_state = dummy_engine.state_at(k)
            aodv_state = aodv_engine.state_at(k)
            assert dummy_state.network_routing == aodv_state.network_routing
            assert dummy_state.network_agent == aodv_state.network_agent
            assert dummy_state.network_agent_breakdown == aodv_state.network_agent_breakdown
            assert dummy_state.nodes.keys() == aodv_state.nodes.keys()
            for node_id in dummy_state.nodes:
                a = dummy_state.nodes[node_id]
                b = aodv_state.nodes[node_id]
                assert a.pos == b.pos, node_id
                assert a.settled == b.settled
                assert a.last_update_event == b.last_update_event
                assert a.network_address == b.network_address
                assert a.routing == b.routing
                assert a.agent == b.agent
                assert a.agent_breakdown == b.agent_breakdown


# -- 8. renderer determinism --------------------------------------------------

def test_criterion_8_renderer_determinism():
    with criterion(8, "renderer: byte-identical PNGs and pixel probes", 10.0):
        prefs = Preferences()
        viewport = Viewport.fit(prefs.terrain, 800, 800)
        plain = _state_with({0: (500.0, 500.0), 1: (200.0, 800.0)})
        arrow_event = parse_line(
            "s -t 1.0 -Hs 0 -Hd 1 -Ni 0 -Nx 500.00 -Ny 500.00 -Nl AGT -It cbr -Il 512", 0, 0
        )
        two_parts = _state_with({0: (200.0, 200.0), 1: (800.0, 800.0)})
        specs = [
            FrameSpec(state=plain, prefs=prefs, viewport=viewport),
            FrameSpec(state=plain, prefs=prefs, viewport=viewport, event=arrow_event),
            FrameSpec(
                state=two_parts,
                prefs=prefs,
                viewport=viewport,
                partitions=compute_partitions(two_parts, 100.0),
            ),
        ]
        import io

        for spec in specs:
            first, second = io.BytesIO(), io.BytesIO()
            render_frame(spec).save(first, format="PNG")
            render_frame(spec).save(second, format="PNG")
            assert first.getvalue() == second.getvalue()

        image = render_frame(specs[0])
        assert image.getpixel(viewport.to_px(500.0, 500.0)) == prefs.colors.node_default + (255,)

        partition_image = render_frame(specs[2])
        background = prefs.colors.background + (255,)
        sample_a = partition_image.getpixel(viewport.to_px(200.0, 250.0))
        sample_b = partition_image.getpixel(viewport.to_px(800.0, 850.0))
        assert sample_a != background and sample_b != background
        assert sample_a != sample_b
        palette = prefs.colors.partition_palette
        for sample, color_key in zip((sample_a, sample_b), (0, 1)):
            base = Image.new("RGBA", (1, 1), background)
            overlay = Image.new("RGBA", (1, 1), palette[color_key % len(palette)] + (70,))
            assert sample == Image.alpha_composite(base, overlay).getpixel((0, 0))


# -- 9. preferences round trip ------------------------------------------------

def test_criterion_9_preferences_round_trip(tmp_path):
    with criterion(9, "preferences: 100 randomized XML round trips", 10.0):
        rng = random.Random(9)
        path = tmp_path / "prefs.xml"
        for _ in range(100):
            prefs = random_prefs(rng)
            save_prefs(prefs, path)
            loaded = load_prefs(path)
            assert loaded == prefs, "field-for-field equality after save/load"
