"""One open trace wired end to end: indexes, protocol extension, replay
engine, partition cache and preferences, plus the JSON-shaped payloads the
HTTP service and the CLI both serve."""

from __future__ import annotations

import io
import threading
import uuid
from dataclasses import asdict

from .cache import DEFAULT_CAPACITY, DEFAULT_STRIDE, ReplayEngine
from .errors import RangeError, TraceError
from .extensions import VisualEvent, VisualEventKind, VisualizerView, registry_resolve
from .index import build_index, load_sidecar
from .model import TraceEvent
from .partitions import PartitionCache, coverage_geometry
from .prefs import Preferences, prefs_to_payload
from .render import FrameSpec, Viewport, render_frame
from .state import NetworkState, node_summary, transmission_properties
from .styles import style_table


class TraceSession:
    """A trace opened for exploration; independent of any other session."""

    def __init__(
        self,
        path,
        *,
        prefs: Preferences | None = None,
        session_id: str | None = None,
        capacity: int = DEFAULT_CAPACITY,
        stride: int = DEFAULT_STRIDE,
        use_sidecar: bool = True,
    ):
        self.path = str(path)
        self.id = session_id or uuid.uuid4().hex[:12]
        index = load_sidecar(self.path) if use_sidecar else None
        self.index = index if index is not None else build_index(self.path)
        resolved = registry_resolve(self.index.prescan.rtr_protocol)
        self.extension = resolved.extension
        self.notice = resolved.notice
        self.prefs = prefs if prefs is not None else Preferences()
        self.engine = ReplayEngine(self.index, self.extension, capacity=capacity, stride=stride)
        self.partitions = PartitionCache(self.engine.state_at)
        self._lock = threading.RLock()

    # -- payload builders ------------------------------------------------

    def metadata(self) -> dict:
        prescan = self.index.prescan
        time_range = None
        if prescan.time_range is not None:
            time_range = {"start": prescan.time_range[0], "end": prescan.time_range[1]}
        return {
            "id": self.id,
            "path": self.path,
            "total_events": self.index.total_events,
            "total_lines": self.index.total_lines,
            "nodes": list(prescan.node_ids),
            "node_count": len(prescan.node_ids),
            "protocol": prescan.rtr_protocol,
            "protocols": list(prescan.protocols),
            "extension": self.extension.name(),
            "notice": self.notice,
            "time_range": time_range,
            "skipped_lines": prescan.skipped_lines,
            "malformed_lines": prescan.malformed_lines,
            "styles": style_table(),
            "prefs": prefs_to_payload(self.prefs),
        }

    def event_payload(self, k: int) -> dict:
        event = self.engine.event_at(k)
        return {
            "event_index": k,
            "line_no": event.line_no,
            "raw_line": self.engine.raw_event_line(k),
            "action": event.action.value,
            "time": event.time,
            "node_id": event.node_id,
            "layer": event.layer.raw,
            "pos": list(event.pos) if event.pos is not None else None,
            "hop_src": event.hop_src,
            "hop_dst": event.hop_dst,
            "energy": event.energy,
            "drop_reason": event.drop_reason,
            "ip_src": str(event.ip_src) if event.ip_src else None,
            "ip_dst": str(event.ip_dst) if event.ip_dst else None,
            "pkt_type": event.pkt_type,
            "pkt_size": event.pkt_size,
            "flow_id": event.flow_id,
            "unique_id": event.unique_id,
            "hop_count": event.hop_count,
            "proto": self._proto_payload(event),
            "transmission": self._transmission_payload(event),
        }

    @staticmethod
    def _proto_payload(event: TraceEvent) -> dict | None:
        if event.proto is None:
            return None
        return {"name": event.proto.name, "entries": [[tag, value] for tag, value in event.proto.entries]}

    @staticmethod
    def _transmission_payload(event: TraceEvent) -> dict:
        props = transmission_properties(event)
        return {
            "direction": props.direction.value,
            "layer": props.layer.raw,
            "flow_id": props.flow_id,
            "ip_src": str(props.ip_src) if props.ip_src else None,
            "ip_dst": str(props.ip_dst) if props.ip_dst else None,
            "current_hop": props.current_hop,
            "next_hop": props.next_hop,
            "next_hop_label": props.next_hop_label,
            "pkt_size": props.pkt_size,
            "pkt_type": props.pkt_type,
            "style": asdict(props.style) if props.style else None,
            "rows": [[label, value] for label, value in props.panel_rows()],
        }

    def _node_payload(self, state: NetworkState, node_id: int) -> dict:
        summary = node_summary(state, node_id)  # RangeError on unknown ids
        node = state.nodes[node_id]
        return {
            "node_id": node_id,
            "pos": list(node.pos),
            "settled": node.settled,
            "grayed": summary.grayed,
            "last_update_event": node.last_update_event,
            "network_address": summary.address,
            "routing": node.routing.as_dict(),
            "agent": node.agent.as_dict(),
            "agent_breakdown": {bucket.value: count for bucket, count in node.agent_breakdown.items()},
            "rows": [[label, value] for label, value in summary.panel_rows()],
        }

    def state_payload(self, k: int) -> dict:
        state = self.engine.state_at(k)
        return {
            "event_index": state.event_index,
            "raw_line": self.engine.raw_event_line(k) if k >= 0 else None,
            "nodes": [self._node_payload(state, node_id) for node_id in sorted(state.nodes)],
            "network": self._network_payload(state),
        }

    @staticmethod
    def _network_payload(state: NetworkState) -> dict:
        return {
            "routing": state.network_routing.as_dict(),
            "agent": state.network_agent.as_dict(),
            "agent_breakdown": {bucket.value: count for bucket, count in state.network_agent_breakdown.items()},
        }

    def stats_payload(self, k: int) -> dict:
        state = self.engine.state_at(k)
        return {
            "event_index": state.event_index,
            "raw_line": self.engine.raw_event_line(k) if k >= 0 else None,
            "network": self._network_payload(state),
            "nodes": [
                {
                    "node_id": node_id,
                    "settled": state.nodes[node_id].settled,
                    "routing": state.nodes[node_id].routing.as_dict(),
                    "agent": state.nodes[node_id].agent.as_dict(),
                    "agent_breakdown": {
                        bucket.value: count for bucket, count in state.nodes[node_id].agent_breakdown.items()
                    },
                }
                for node_id in sorted(state.nodes)
            ],
        }

    def partitions_payload(self, k: int, radio_range: float) -> dict:
        partition_set = self.partitions.partitions_at(k, radio_range)
        state = self.engine.state_at(k)
        return {
            "event_index": partition_set.event_index,
            "radio_range": partition_set.radio_range,
            "components": [
                {
                    "color_key": coverage.color_key,
                    "nodes": list(coverage.node_ids),
                    "disks": [{"x": disk.x, "y": disk.y, "r": disk.radius} for disk in coverage.disks],
                }
                for coverage in coverage_geometry(partition_set, state)
            ],
        }

    def screenshot_png(self, k: int, radio_range: float | None = None) -> bytes:
        """PNG of the network at event k; partition overlay only when a
        radio range is given."""
        state = self.engine.state_at(k)
        event = self.engine.event_at(k) if k >= 0 else None
        partition_set = self.partitions.partitions_at(k, radio_range) if radio_range is not None else None
        spec = FrameSpec(
            state=state,
            prefs=self.prefs,
            viewport=Viewport.fit(self.prefs.terrain),
            event=event,
            partitions=partition_set,
        )
        buffer = io.BytesIO()
        render_frame(spec).save(buffer, format="PNG")
        return buffer.getvalue()

    def notify(self, event: VisualEvent) -> dict:
        """Dispatch a UI event to the protocol extension; returns the
        protocol panel rows plus context for the other panels."""
        if not -1 <= event.event_index < self.index.total_events:
            raise RangeError(
                f"event {event.event_index} out of range -1..{self.index.total_events - 1}"
            )
        if event.kind is VisualEventKind.NODE_CLICKED and event.node_id is None:
            raise TraceError("node_clicked requires a node_id")
        if event.kind is VisualEventKind.TRANSMISSION_CLICKED and event.event_index < 0:
            raise RangeError("transmission_clicked requires an event index >= 0")
        view = VisualizerView(self.engine, self.prefs)
        rows = self.extension.notify_event(event, view)
        payload: dict = {
            "kind": event.kind.value,
            "event_index": event.event_index,
            "panel": [[label, value] for label, value in rows],
        }
        if event.kind is VisualEventKind.NODE_CLICKED:
            state = self.engine.state_at(event.event_index)
            payload["node"] = self._node_payload(state, event.node_id)
        elif event.kind is VisualEventKind.TRANSMISSION_CLICKED:
            payload["transmission"] = self._transmission_payload(self.engine.event_at(event.event_index))
        return payload

    def set_prefs(self, prefs: Preferences) -> None:
        prefs.validate()
        with self._lock:
            self.prefs = prefs
