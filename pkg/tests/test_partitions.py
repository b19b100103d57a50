from __future__ import annotations

import random

import pytest

from traceplay import (
    DummyExtension,
    MobileNode,
    NetworkState,
    PartitionCache,
    RangeError,
    ReplayEngine,
    build_index,
    compute_partitions,
    coverage_geometry,
)

from oracles import bfs_partitions


def state_with(positions, unsettled=()):
    nodes = {}
    for node_id, (x, y) in positions.items():
        nodes[node_id] = MobileNode(
            node_id=node_id,
            pos=(x, y, 0.0),
            settled=node_id not in unsettled,
            last_update_event=None if node_id in unsettled else 0,
        )
    return NetworkState(event_index=0, nodes=nodes)


def test_distance_exactly_r_is_connected():
    state = state_with({0: (0.0, 0.0), 1: (3.0, 4.0)})  # distance exactly 5
    parts = compute_partitions(state, 5.0)
    assert parts.components == ((0, 1),)


def test_zero_range_gives_singletons():
    state = state_with({0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0)})
    parts = compute_partitions(state, 0.0)
    assert parts.components == ((0,), (1,), (2,))


def test_zero_range_keeps_coincident_nodes_together():
    state = state_with({0: (1.0, 1.0), 1: (1.0, 1.0)})
    assert compute_partitions(state, 0.0).components == ((0, 1),)


def test_unsettled_nodes_excluded():
    # node 1 would bridge 0 and 2, but it is unsettled and must not count
    state = state_with({0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0)}, unsettled={1})
    parts = compute_partitions(state, 1.5)
    assert parts.components == ((0,), (2,))
    settled_everywhere = state_with({0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0)})
    assert compute_partitions(settled_everywhere, 1.5).components == ((0, 1, 2),)


def test_negative_range_rejected():
    with pytest.raises(ValueError):
        compute_partitions(state_with({0: (0.0, 0.0)}), -1.0)


def test_random_instances_match_bfs_oracle():
    rng = random.Random(42)
    for _ in range(200):
        count = rng.randint(0, 20)
        positions = {i: (rng.uniform(0, 100), rng.uniform(0, 100)) for i in range(count)}
        radius = rng.uniform(0, 60)
        parts = compute_partitions(state_with(positions), radius)
        assert list(parts.components) == bfs_partitions(positions, radius)


def test_refinement_monotonicity():
    rng = random.Random(7)
    for _ in range(50):
        count = rng.randint(2, 20)
        positions = {i: (rng.uniform(0, 100), rng.uniform(0, 100)) for i in range(count)}
        r1 = rng.uniform(0, 40)
        r2 = r1 + rng.uniform(0, 40)
        fine = compute_partitions(state_with(positions), r1)
        coarse = compute_partitions(state_with(positions), r2)
        for component in fine.components:
            members = set(component)
            assert any(members <= set(big) for big in coarse.components)


def test_color_key_is_min_id_and_stable():
    state = state_with({3: (0.0, 0.0), 7: (1.0, 0.0), 9: (50.0, 50.0)})
    parts = compute_partitions(state, 2.0)
    assert parts.components == ((3, 7), (9,))
    assert parts.color_keys == (3, 9)
    assert parts.component_of(7) == 0
    assert parts.component_of(9) == 1
    assert parts.component_of(4) is None


def test_symmetry_under_id_permutation():
    rng = random.Random(9)
    positions = {i: (rng.uniform(0, 50), rng.uniform(0, 50)) for i in range(10)}
    radius = 18.0
    base = compute_partitions(state_with(positions), radius)
    mapping = {i: i + 100 for i in positions}
    permuted = compute_partitions(state_with({mapping[i]: p for i, p in positions.items()}), radius)
    expected = sorted(tuple(sorted(mapping[i] for i in comp)) for comp in base.components)
    assert sorted(permuted.components) == expected


def test_coverage_one_disk_per_settled_node():
    state = state_with({3: (0.0, 0.0), 7: (1.0, 0.0), 9: (50.0, 50.0)})
    parts = compute_partitions(state, 2.0)
    coverage = coverage_geometry(parts, state)
    assert [c.color_key for c in coverage] == [3, 9]
    assert coverage[0].node_ids == (3, 7)
    assert len(coverage[0].disks) == 2
    assert coverage[0].disks[0].radius == 2.0
    assert (coverage[1].disks[0].x, coverage[1].disks[0].y) == (50.0, 50.0)


def test_single_node_single_disk():
    state = state_with({0: (5.0, 5.0)})
    parts = compute_partitions(state, 7.0)
    coverage = coverage_geometry(parts, state)
    assert len(coverage) == 1
    assert len(coverage[0].disks) == 1
    assert coverage[0].disks[0].radius == 7.0


def test_partition_cache_hits_and_recompute(small_trace):
    engine = ReplayEngine(build_index(small_trace), DummyExtension())
    cache = PartitionCache(engine.state_at)
    first = cache.partitions_at(50, 120.0)
    assert cache.compute_count == 1
    assert cache.partitions_at(50, 120.0) is first  # hit: zero recomputation
    assert cache.compute_count == 1
    cache.partitions_at(50, 121.0)  # changed range: recompute
    assert cache.compute_count == 2
    cache.partitions_at(51, 120.0)  # changed event: recompute
    assert cache.compute_count == 3


def test_partition_cache_equals_uncached_recompute(small_trace):
    engine = ReplayEngine(build_index(small_trace), DummyExtension())
    cache = PartitionCache(engine.state_at, capacity=4)
    rng = random.Random(2)
    queries = [(rng.randrange(300), round(rng.uniform(0, 400), 3)) for _ in range(50)]
    for k, radius in queries:
        cached = cache.partitions_at(k, radius)
        assert cached == compute_partitions(engine.state_at(k), radius)


def test_partition_cache_propagates_range_errors(small_trace):
    engine = ReplayEngine(build_index(small_trace), DummyExtension())
    cache = PartitionCache(engine.state_at)
    with pytest.raises(RangeError):
        cache.partitions_at(10_000, 50.0)
