"""Streaming index build and memory-bounded random line access.

One sequential pass over the trace produces the line-offset index, the
event-line index and the pre-scan (first positions, node set, protocol
names). The result can be persisted next to the trace as a versioned
binary sidecar so large traces reopen without a rescan.
"""

from __future__ import annotations

import json
import logging
import os
import struct
import sys
from array import array
from bisect import bisect_right
from dataclasses import dataclass

from .errors import RangeError
from .parser import Skipped, parse_line

log = logging.getLogger(__name__)

DEFAULT_BUFFER_SIZE = 64 * 1024
SIDECAR_SUFFIX = ".exidx"

_SIDECAR_MAGIC = b"EXIDX\x00\x00\x00"
_SIDECAR_VERSION = 1
_HEADER = struct.Struct("<IqqqqQ")  # version, file_length, mtime_ns, lines, events, prescan length


@dataclass(frozen=True)
class PreScan:
    """Early-positioning data gathered while the indexes are built."""

    first_event: dict[int, int]
    first_position: dict[int, tuple[float, float]]
    node_ids: tuple[int, ...]
    protocols: tuple[str, ...]
    rtr_protocol: str | None
    skipped_lines: int
    malformed_lines: int
    skipped_reasons: dict[str, int]
    time_range: tuple[float, float] | None
    out_of_order_times: int = 0


@dataclass
class TraceIndex:
    """Line-offset and event-line indexes plus the pre-scan for one trace.

    ``offsets[i]`` is the byte offset of the start of line i (including
    terminators in the spans); ``event_lines[k]`` is the line number of
    event k. Both are dense int64 arrays, so memory stays O(total_lines)
    regardless of file size.
    """

    path: str
    file_length: int
    mtime_ns: int
    offsets: array
    event_lines: array
    prescan: PreScan

    @property
    def total_lines(self) -> int:
        return len(self.offsets)

    @property
    def total_events(self) -> int:
        return len(self.event_lines)

    def line_span(self, line_no: int) -> tuple[int, int]:
        """Byte span [start, end) of a line, terminator included."""
        if not 0 <= line_no < self.total_lines:
            raise RangeError(f"line {line_no} out of range 0..{self.total_lines - 1}")
        start = self.offsets[line_no]
        end = self.offsets[line_no + 1] if line_no + 1 < self.total_lines else self.file_length
        return start, end

    def event_line_no(self, k: int) -> int:
        if not 0 <= k < self.total_events:
            raise RangeError(f"event {k} out of range 0..{self.total_events - 1}")
        return self.event_lines[k]

    def event_for_line(self, line_no: int) -> int | None:
        """Nearest previous event for a line, or None before the first event."""
        if not 0 <= line_no < self.total_lines:
            raise RangeError(f"line {line_no} out of range 0..{self.total_lines - 1}")
        pos = bisect_right(self.event_lines, line_no)
        return pos - 1 if pos > 0 else None

    def open_reader(self, buffer_size: int = DEFAULT_BUFFER_SIZE) -> LineReader:
        return LineReader(self, buffer_size)


class LineReader:
    """Random access to raw trace lines through one buffered file handle.

    Each reader owns its buffer: create one per concurrent consumer.
    ``read_count`` counts actual file reads; repeated fetches of buffered
    lines do not touch the file.
    """

    def __init__(self, index: TraceIndex, buffer_size: int = DEFAULT_BUFFER_SIZE):
        if buffer_size <= 0:
            raise ValueError("buffer_size must be positive")
        self._index = index
        self._buffer_size = buffer_size
        self._handle = open(index.path, "rb", buffering=0)
        self._buf = b""
        self._buf_start = 0
        self.read_count = 0

    def close(self) -> None:
        self._handle.close()

    def __enter__(self) -> LineReader:
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def line_bytes(self, line_no: int) -> bytes:
        """Exact bytes of a line without its terminator."""
        start, end = self._index.line_span(line_no)
        if not (self._buf_start <= start and end <= self._buf_start + len(self._buf)):
            self._handle.seek(start)
            self._buf = self._handle.read(max(end - start, self._buffer_size))
            self._buf_start = start
            self.read_count += 1
        data = self._buf[start - self._buf_start : end - self._buf_start]
        return data.rstrip(b"\r\n")

    def line_text(self, line_no: int) -> str:
        return self.line_bytes(line_no).decode("utf-8", "replace")

    def event_line(self, k: int) -> str:
        """Raw text of event k via the two-step event -> line -> span lookup."""
        return self.line_text(self._index.event_line_no(k))


def build_index(path: str | os.PathLike) -> TraceIndex:
    """Index a trace in one sequential pass.

    Peak memory is the two index arrays plus one read buffer; the file is
    never held in memory. Skipped lines are counted, never fatal.
    """
    stat = os.stat(path)
    offsets = array("q")
    event_lines = array("q")
    first_event: dict[int, int] = {}
    first_position: dict[int, tuple[float, float]] = {}
    protocols: list[str] = []
    rtr_protocol: str | None = None
    skipped = 0
    malformed = 0
    reasons: dict[str, int] = {}
    t_first: float | None = None
    t_prev: float | None = None
    t_last: float | None = None
    out_of_order = 0

    offset = 0
    line_no = 0
    with open(path, "rb") as handle:
        for raw in handle:
            offsets.append(offset)
            offset += len(raw)
            parsed = parse_line(raw.decode("utf-8", "replace").rstrip("\r\n"), line_no, len(event_lines))
            if isinstance(parsed, Skipped):
                skipped += 1
                if parsed.malformed:
                    malformed += 1
                reasons[parsed.reason] = reasons.get(parsed.reason, 0) + 1
            else:
                event_lines.append(line_no)
                node = parsed.node_id
                if node not in first_event:
                    first_event[node] = parsed.event_index
                if node not in first_position and parsed.pos is not None:
                    first_position[node] = (parsed.pos[0], parsed.pos[1])
                if parsed.proto is not None:
                    name = parsed.proto.name
                    if name not in protocols:
                        protocols.append(name)
                    if rtr_protocol is None and parsed.layer.is_routing:
                        rtr_protocol = name
                if t_first is None:
                    t_first = parsed.time
                if t_prev is not None and parsed.time < t_prev:
                    if out_of_order == 0:
                        log.warning(
                            "%s: event %d has time %g before previous %g (replay stays in line order)",
                            path, parsed.event_index, parsed.time, t_prev,
                        )
                    out_of_order += 1
                t_prev = parsed.time
                t_last = parsed.time
            line_no += 1

    prescan = PreScan(
        first_event=first_event,
        first_position=first_position,
        node_ids=tuple(sorted(first_event)),
        protocols=tuple(protocols),
        rtr_protocol=rtr_protocol,
        skipped_lines=skipped,
        malformed_lines=malformed,
        skipped_reasons=reasons,
        time_range=(t_first, t_last) if t_first is not None and t_last is not None else None,
        out_of_order_times=out_of_order,
    )
    return TraceIndex(
        path=os.fspath(path),
        file_length=offset,
        mtime_ns=stat.st_mtime_ns,
        offsets=offsets,
        event_lines=event_lines,
        prescan=prescan,
    )


def sidecar_path(trace_path: str | os.PathLike) -> str:
    return os.fspath(trace_path) + SIDECAR_SUFFIX


def _prescan_to_json(prescan: PreScan) -> bytes:
    payload = {
        "first_event": {str(k): v for k, v in prescan.first_event.items()},
        "first_position": {str(k): list(v) for k, v in prescan.first_position.items()},
        "protocols": list(prescan.protocols),
        "rtr_protocol": prescan.rtr_protocol,
        "skipped_lines": prescan.skipped_lines,
        "malformed_lines": prescan.malformed_lines,
        "skipped_reasons": prescan.skipped_reasons,
        "time_range": list(prescan.time_range) if prescan.time_range else None,
        "out_of_order_times": prescan.out_of_order_times,
    }
    return json.dumps(payload).encode("utf-8")


def _prescan_from_json(blob: bytes) -> PreScan:
    payload = json.loads(blob.decode("utf-8"))
    first_event = {int(k): v for k, v in payload["first_event"].items()}
    first_position = {int(k): (v[0], v[1]) for k, v in payload["first_position"].items()}
    time_range = payload["time_range"]
    return PreScan(
        first_event=first_event,
        first_position=first_position,
        node_ids=tuple(sorted(first_event)),
        protocols=tuple(payload["protocols"]),
        rtr_protocol=payload["rtr_protocol"],
        skipped_lines=payload["skipped_lines"],
        malformed_lines=payload["malformed_lines"],
        skipped_reasons=payload["skipped_reasons"],
        time_range=(time_range[0], time_range[1]) if time_range else None,
        out_of_order_times=payload.get("out_of_order_times", 0),
    )


def save_sidecar(index: TraceIndex, path: str | os.PathLike | None = None) -> str:
    """Persist the indexes next to the trace (versioned binary)."""
    target = os.fspath(path) if path is not None else sidecar_path(index.path)
    prescan_blob = _prescan_to_json(index.prescan)
    header = _HEADER.pack(
        _SIDECAR_VERSION,
        index.file_length,
        index.mtime_ns,
        index.total_lines,
        index.total_events,
        len(prescan_blob),
    )
    with open(target, "wb") as handle:
        handle.write(_SIDECAR_MAGIC)
        handle.write(header)
        handle.write(struct.pack(f"<{index.total_lines}q", *index.offsets))
        handle.write(struct.pack(f"<{index.total_events}q", *index.event_lines))
        handle.write(prescan_blob)
    return target


def load_sidecar(trace_path: str | os.PathLike, path: str | os.PathLike | None = None) -> TraceIndex | None:
    """Load a sidecar if present and still valid for the trace.

    Returns None when the sidecar is missing, unreadable, from another
    version, or stale (trace size or mtime differ).
    """
    source = os.fspath(path) if path is not None else sidecar_path(trace_path)
    try:
        stat = os.stat(trace_path)
        with open(source, "rb") as handle:
            blob = handle.read()
    except OSError:
        return None
    if not blob.startswith(_SIDECAR_MAGIC):
        log.warning("%s: bad sidecar magic, rebuilding", source)
        return None
    try:
        version, file_length, mtime_ns, total_lines, total_events, prescan_len = _HEADER.unpack_from(
            blob, len(_SIDECAR_MAGIC)
        )
        if version != _SIDECAR_VERSION:
            return None
        if file_length != stat.st_size or mtime_ns != stat.st_mtime_ns:
            return None
        cursor = len(_SIDECAR_MAGIC) + _HEADER.size
        offsets = array("q")
        offsets.frombytes(blob[cursor : cursor + 8 * total_lines])
        cursor += 8 * total_lines
        event_lines = array("q")
        event_lines.frombytes(blob[cursor : cursor + 8 * total_events])
        cursor += 8 * total_events
        if sys.byteorder == "big":  # sidecars are little-endian on disk
            offsets.byteswap()
            event_lines.byteswap()
        prescan = _prescan_from_json(blob[cursor : cursor + prescan_len])
    except (struct.error, ValueError, KeyError) as exc:
        log.warning("%s: unreadable sidecar (%s), rebuilding", source, exc)
        return None
    if len(offsets) != total_lines or len(event_lines) != total_events:
        return None
    return TraceIndex(
        path=os.fspath(trace_path),
        file_length=file_length,
        mtime_ns=mtime_ns,
        offsets=offsets,
        event_lines=event_lines,
        prescan=prescan,
    )
