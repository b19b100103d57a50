"""Snapshot cache and the replay engine built on nearest-previous-snapshot
jumps. Deep-copied network states are kept under LRU replacement; a jump
to event k replays only from the closest previous snapshot."""

from __future__ import annotations

import threading
from collections import OrderedDict

from .errors import RangeError, StateError
from .index import TraceIndex
from .model import TraceEvent
from .parser import parse_line
from .state import NetworkState, apply_event, copy_state, initial_state

DEFAULT_CAPACITY = 64
DEFAULT_STRIDE = 500


class SnapshotCache:
    """LRU store of deep-copied network snapshots keyed by event index.

    Snapshots at stride multiples outlive arbitrary jump targets at
    eviction time, which keeps the replay-work bound intact under long
    random-jump sessions; within each tier replacement is plain LRU.
    The initial state (index -1) is pinned outside the capacity budget.
    Eviction changes cost only, never answers.
    """

    def __init__(self, capacity: int = DEFAULT_CAPACITY, stride: int = DEFAULT_STRIDE):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        if stride < 1:
            raise ValueError("stride must be at least 1")
        self.capacity = capacity
        self.stride = stride
        self._initial: NetworkState | None = None
        self._stride_tier: OrderedDict[int, NetworkState] = OrderedDict()
        self._jump_tier: OrderedDict[int, NetworkState] = OrderedDict()

    def __len__(self) -> int:
        return len(self._stride_tier) + len(self._jump_tier)

    def __contains__(self, k: int) -> bool:
        return k in self._stride_tier or k in self._jump_tier

    def keys(self) -> list[int]:
        return sorted([*self._stride_tier, *self._jump_tier])

    @property
    def initial(self) -> NetworkState | None:
        return self._initial

    def set_initial(self, state: NetworkState) -> None:
        self._initial = state

    def _tier_of(self, k: int) -> OrderedDict[int, NetworkState]:
        return self._stride_tier if k % self.stride == 0 else self._jump_tier

    def get(self, k: int) -> NetworkState | None:
        if k == -1:
            return self._initial
        tier = self._tier_of(k)
        state = tier.get(k)
        if state is not None:
            tier.move_to_end(k)
        return state

    def floor(self, k: int) -> tuple[int, NetworkState]:
        """Largest cached index <= k; falls back to the pinned initial state."""
        best_k = -2
        best_tier: OrderedDict[int, NetworkState] | None = None
        for tier in (self._stride_tier, self._jump_tier):
            for key in tier:
                if best_k < key <= k:
                    best_k = key
                    best_tier = tier
        if best_tier is None:
            if self._initial is None:
                raise StateError("snapshot cache has no initial state")
            return -1, self._initial
        best_tier.move_to_end(best_k)
        return best_k, best_tier[best_k]

    def put(self, k: int, state: NetworkState) -> None:
        """Store a snapshot (already a deep copy owned by the cache)."""
        if k == -1:
            self._initial = state
            return
        tier = self._tier_of(k)
        tier[k] = state
        tier.move_to_end(k)
        while len(self) > self.capacity:
            victim = self._jump_tier if self._jump_tier else self._stride_tier
            victim.popitem(last=False)


class ReplayEngine:
    """Produces the network state at any event via cached-snapshot replay.

    One engine owns one trace's replay: calls are serialized internally
    and every returned state is an immutable snapshot safe to share.
    ``events_replayed`` counts apply steps, for the bounded-work probes.
    """

    def __init__(
        self,
        index: TraceIndex,
        extension,
        *,
        capacity: int = DEFAULT_CAPACITY,
        stride: int = DEFAULT_STRIDE,
        buffer_size: int | None = None,
    ):
        self._index = index
        self._ext = extension
        self._reader = index.open_reader(buffer_size) if buffer_size else index.open_reader()
        self._cache = SnapshotCache(capacity=capacity, stride=stride)
        self._lock = threading.RLock()
        self._event_memo: OrderedDict[int, TraceEvent] = OrderedDict()
        self.diagnostics: list[str] = []
        self.events_replayed = 0
        self._cache.set_initial(initial_state(index.prescan, extension, self.diagnostics))

    @property
    def index(self) -> TraceIndex:
        return self._index

    @property
    def extension(self):
        return self._ext

    @property
    def cache(self) -> SnapshotCache:
        return self._cache

    @property
    def total_events(self) -> int:
        return self._index.total_events

    def raw_event_line(self, k: int) -> str:
        with self._lock:
            return self._reader.event_line(k)

    def event_at(self, k: int) -> TraceEvent:
        with self._lock:
            memo = self._event_memo.get(k)
            if memo is not None:
                self._event_memo.move_to_end(k)
                return memo
            raw = self._reader.event_line(k)
            parsed = parse_line(raw, self._index.event_line_no(k), k)
            if not isinstance(parsed, TraceEvent):
                raise StateError(
                    f"line indexed as event {k} no longer parses ({parsed.reason}); trace changed on disk?"
                )
            self._event_memo[k] = parsed
            if len(self._event_memo) > 32:
                self._event_memo.popitem(last=False)
            return parsed

    def state_at(self, k: int) -> NetworkState:
        """State after events 0..k (k = -1 is the initial state).

        Cache hits return directly; otherwise replay starts from the
        closest previous snapshot and the result is cached.
        """
        with self._lock:
            if not -1 <= k < self.total_events:
                raise RangeError(f"event {k} out of range -1..{self.total_events - 1}")
            if k == -1:
                return self._cache.initial
            cached = self._cache.get(k)
            if cached is not None:
                return cached
            base_k, base = self._cache.floor(k)
            live = copy_state(base, self._ext)
            stride = self._cache.stride
            for j in range(base_k + 1, k + 1):
                apply_event(live, self.event_at(j), self._ext)
                self.events_replayed += 1
                if j != k and j % stride == 0:
                    self._cache.put(j, copy_state(live, self._ext))
            self._cache.put(k, live)
            return live

    def record_playback_snapshot(self, k: int, state: NetworkState) -> None:
        """Deep-copy a playback state into the cache (stride points and
        jump targets)."""
        with self._lock:
            self._cache.put(k, copy_state(state, self._ext))
