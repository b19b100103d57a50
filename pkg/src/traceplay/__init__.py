"""Exploration engine and animator for NS-2 wireless simulation traces.

Parses "new wireless trace" files, reconstructs whole-network state at any
event through snapshot caching, computes radio-range partitions and
traffic statistics, and serves it all over HTTP, PNG export and a CLI,
with a protocol-extension mechanism (AODV included).
"""

from .cache import ReplayEngine, SnapshotCache
from .errors import PrefsError, RangeError, SequenceError, StateError, TraceError
from .extensions import (
    AodvExtension,
    AodvNodeData,
    AodvRouteEntry,
    DummyExtension,
    ProtocolExtension,
    ResolvedExtension,
    VisualEvent,
    VisualEventKind,
    VisualizerView,
    register_extension,
    registry_resolve,
)
from .index import LineReader, PreScan, TraceIndex, build_index, load_sidecar, save_sidecar, sidecar_path
from .model import (
    Action,
    Address,
    AgentClass,
    Layer,
    LayerKind,
    ProtocolProps,
    TraceEvent,
    classify_agent_packet,
    format_event,
)
from .parser import Skipped, detect_protocol, parse_line
from .partitions import (
    ComponentCoverage,
    CoverageDisk,
    PartitionCache,
    PartitionSet,
    compute_partitions,
    coverage_geometry,
)
from .prefs import Colors, Preferences, load_prefs, prefs_from_payload, prefs_to_payload, save_prefs
from .render import FrameSpec, Viewport, export_png, render_frame
from .session import TraceSession
from .state import (
    CounterSet,
    MobileNode,
    NetworkState,
    NodeSummary,
    TransmissionProps,
    apply_event,
    copy_state,
    initial_state,
    node_summary,
    transmission_properties,
)
from .styles import ArrowStyle, arrow_style, style_table

__version__ = "0.1.0"
