// Payload shapes of the HTTP API (see docs/api.md in the repo root).

export type PanelRows = [string, string][];

export interface ArrowStyle {
  thickness: "fat" | "slim";
  dash: "dashed" | "solid" | "none";
  color_key: string;
  glyph: "arrow" | "ring" | "node-highlight";
}

export type StyleTable = Record<string, ArrowStyle | null>;

export interface CounterDict {
  sent: number;
  received: number;
  forwarded: number;
  dropped: number;
}

export interface AgentBreakdown {
  cbr: number;
  tcp_ack: number;
  other: number;
}

export interface PrefsPayload {
  colors: Record<string, string | string[]> & { partition_palette: string[] };
  terrain: [number, number];
  radio_range: number;
  filters: { show_routing: boolean; show_agent: boolean };
  screenshot_dir: string;
  playback_speed: number;
}

export interface SessionMetadata {
  id: string;
  path: string;
  total_events: number;
  total_lines: number;
  nodes: number[];
  node_count: number;
  protocol: string | null;
  protocols: string[];
  extension: string;
  notice: string | null;
  time_range: { start: number; end: number } | null;
  skipped_lines: number;
  malformed_lines: number;
  styles: StyleTable;
  prefs: PrefsPayload;
}

export interface TransmissionPayload {
  direction: string;
  layer: string;
  flow_id: number | null;
  ip_src: string | null;
  ip_dst: string | null;
  current_hop: number | null;
  next_hop: number | null;
  next_hop_label: string;
  pkt_size: number | null;
  pkt_type: string | null;
  style: ArrowStyle | null;
  rows: PanelRows;
}

export interface EventPayload {
  event_index: number;
  line_no: number;
  raw_line: string;
  action: string;
  time: number;
  node_id: number;
  layer: string;
  pos: [number, number, number] | null;
  hop_src: number | null;
  hop_dst: number | null;
  energy: number | null;
  drop_reason: string | null;
  ip_src: string | null;
  ip_dst: string | null;
  pkt_type: string | null;
  pkt_size: number | null;
  flow_id: number | null;
  unique_id: number | null;
  hop_count: number | null;
  proto: { name: string; entries: [string, string][] } | null;
  transmission: TransmissionPayload;
}

export interface NodePayload {
  node_id: number;
  pos: [number, number, number];
  settled: boolean;
  grayed: boolean;
  last_update_event: number | null;
  network_address: string | null;
  routing: CounterDict;
  agent: CounterDict;
  agent_breakdown: AgentBreakdown;
  rows: PanelRows;
}

export interface NetworkTotals {
  routing: CounterDict;
  agent: CounterDict;
  agent_breakdown: AgentBreakdown;
}

export interface StatePayload {
  event_index: number;
  raw_line: string | null;
  nodes: NodePayload[];
  network: NetworkTotals;
}

export interface PartitionComponent {
  color_key: number;
  nodes: number[];
  disks: { x: number; y: number; r: number }[];
}

export interface PartitionsPayload {
  event_index: number;
  radio_range: number;
  components: PartitionComponent[];
}

export interface NotifyPayload {
  kind: string;
  event_index: number;
  panel: PanelRows;
  node?: NodePayload;
  transmission?: TransmissionPayload;
}
