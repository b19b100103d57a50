"""Radio-range partitions: connected components of the unit-disk graph on
settled node positions, their coverage disks, and a result cache."""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable

from .state import NetworkState


@dataclass(frozen=True)
class PartitionSet:
    """Connected components of the settled nodes under a circular range.

    Two settled nodes share a component iff they are connected by hops of
    2-D Euclidean distance <= radio_range (inclusive). Components are
    sorted by their color key (the minimum node id in the component), ids
    sorted within.
    """

    event_index: int
    radio_range: float
    components: tuple[tuple[int, ...], ...]

    @property
    def color_keys(self) -> tuple[int, ...]:
        return tuple(component[0] for component in self.components)

    def component_of(self, node_id: int) -> int | None:
        for position, component in enumerate(self.components):
            if node_id in component:
                return position
        return None


def compute_partitions(state: NetworkState, radio_range: float) -> PartitionSet:
    """Unit-disk components over settled nodes; unsettled ones are excluded."""
    if radio_range < 0:
        raise ValueError("radio range must be non-negative")
    settled = sorted(node_id for node_id, node in state.nodes.items() if node.settled)
    positions = [(state.nodes[node_id].pos[0], state.nodes[node_id].pos[1]) for node_id in settled]
    count = len(settled)
    parent = list(range(count))

    def find(i: int) -> int:
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:  # path compression
            parent[i], i = root, parent[i]
        return root

    limit = radio_range * radio_range
    for i in range(count):
        xi, yi = positions[i]
        for j in range(i + 1, count):
            dx = positions[j][0] - xi
            dy = positions[j][1] - yi
            if dx * dx + dy * dy <= limit:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups: dict[int, list[int]] = {}
    for i, node_id in enumerate(settled):
        groups.setdefault(find(i), []).append(node_id)
    components = sorted((tuple(sorted(member_ids)) for member_ids in groups.values()), key=lambda c: c[0])
    return PartitionSet(
        event_index=state.event_index,
        radio_range=radio_range,
        components=tuple(components),
    )


@dataclass(frozen=True)
class CoverageDisk:
    x: float
    y: float
    radius: float


@dataclass(frozen=True)
class ComponentCoverage:
    """One disk of radius r per settled node, grouped and color-keyed by
    component. The drawn union of overlapping same-color disks is the
    partition's coverage; no exact boundary polygon is computed."""

    color_key: int
    node_ids: tuple[int, ...]
    disks: tuple[CoverageDisk, ...]


def coverage_geometry(partitions: PartitionSet, state: NetworkState) -> list[ComponentCoverage]:
    """Coverage disks for each component of a partition set.

    ``state`` must be the snapshot the partitions were computed against.
    """
    coverage = []
    for component in partitions.components:
        disks = tuple(
            CoverageDisk(state.nodes[node_id].pos[0], state.nodes[node_id].pos[1], partitions.radio_range)
            for node_id in component
        )
        coverage.append(ComponentCoverage(color_key=component[0], node_ids=component, disks=disks))
    return coverage


class PartitionCache:
    """LRU cache of partition results keyed by (event index, radio range).

    ``state_source`` maps an event index to its network state (normally
    ``ReplayEngine.state_at``); range errors from it propagate unchanged.
    ``compute_count`` backs the cache-hit probes.
    """

    def __init__(self, state_source: Callable[[int], NetworkState], capacity: int = 128):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self._state_source = state_source
        self._capacity = capacity
        self._entries: OrderedDict[tuple[int, float], PartitionSet] = OrderedDict()
        self._lock = threading.Lock()
        self.compute_count = 0

    def partitions_at(self, k: int, radio_range: float) -> PartitionSet:
        key = (k, float(radio_range))
        with self._lock:
            cached = self._entries.get(key)
            if cached is not None:
                self._entries.move_to_end(key)
                return cached
        state = self._state_source(k)
        result = compute_partitions(state, radio_range)
        with self._lock:
            self.compute_count += 1
            self._entries[key] = result
            self._entries.move_to_end(key)
            while len(self._entries) > self._capacity:
                self._entries.popitem(last=False)
        return result
