// UI state and the playback controller.
//
// The controller owns the current event index k (always within
// [-1, total_events - 1]) and keeps the panel contents in sync with the
// displayed k: at most one state fetch is in flight, and responses for a
// k that is no longer current are discarded (k-tag rule).

import { ApiClient } from "./api.js";
import type {
  EventPayload,
  NodePayload,
  NotifyPayload,
  PanelRows,
  PartitionsPayload,
  SessionMetadata,
  StatePayload,
} from "./types.js";

export interface ViewTransform {
  zoom: number; // multiplier over the fit-to-canvas scale
  panX: number; // pixels
  panY: number;
}

export interface UiState {
  session: SessionMetadata | null;
  k: number;
  playing: boolean;
  speed: number; // events per second
  view: ViewTransform;
  selectedNode: number | null;
  showRouting: boolean;
  showAgent: boolean;
  showPartitions: boolean;
  radioRange: number;
  state: StatePayload | null;
  event: EventPayload | null;
  partitions: PartitionsPayload | null;
  protocolPanel: PanelRows;
  nodePanel: NodePayload | null;
  rawLine: string;
  notice: string;
  loading: boolean;
}

export type Listener = (state: UiState) => void;

interface Scheduler {
  setInterval(handler: () => void, ms: number): number;
  clearInterval(id: number): void;
}

const MIN_SPEED = 0.25;
const MAX_SPEED = 64;

export class PlaybackController {
  private listeners: Listener[] = [];
  private fetchGeneration = 0;
  private timer: number | null = null;

  readonly ui: UiState = {
    session: null,
    k: -1,
    playing: false,
    speed: 4,
    view: { zoom: 1, panX: 0, panY: 0 },
    selectedNode: null,
    showRouting: true,
    showAgent: true,
    showPartitions: false,
    radioRange: 250,
    state: null,
    event: null,
    partitions: null,
    protocolPanel: [],
    nodePanel: null,
    rawLine: "",
    notice: "",
    loading: false,
  };

  constructor(
    private readonly api: ApiClient,
    private readonly scheduler: Scheduler = globalThis as unknown as Scheduler,
  ) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((entry) => entry !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.ui);
  }

  get lastEventIndex(): number {
    return this.ui.session ? this.ui.session.total_events - 1 : -1;
  }

  clampIndex(k: number): number {
    return Math.max(-1, Math.min(this.lastEventIndex, Math.trunc(k)));
  }

  /** Attach the first open session, or open the given trace path. */
  async start(path?: string): Promise<void> {
    let session: SessionMetadata | null = null;
    if (path) {
      session = await this.api.openSession(path);
    } else {
      const listing = await this.api.listSessions();
      session = listing.sessions[0] ?? null;
    }
    if (!session) {
      this.ui.notice = "no open session; start the server with a trace";
      this.emit();
      return;
    }
    this.attach(session);
    await this.jumpTo(-1);
  }

  attach(session: SessionMetadata): void {
    this.ui.session = session;
    this.ui.speed = session.prefs.playback_speed > 0 ? session.prefs.playback_speed * 4 : 4;
    this.ui.showRouting = session.prefs.filters.show_routing;
    this.ui.showAgent = session.prefs.filters.show_agent;
    this.ui.radioRange = session.prefs.radio_range;
    this.ui.notice = session.notice ?? "";
    this.emit();
  }

  /** Jump to event k: fetch state, event and (optionally) partitions. */
  async jumpTo(k: number): Promise<void> {
    const session = this.ui.session;
    if (!session) return;
    const target = this.clampIndex(k);
    this.ui.k = target;
    this.ui.loading = true;
    this.emit();
    const generation = ++this.fetchGeneration;
    try {
      const [state, event, partitions] = await Promise.all([
        this.api.state(session.id, target),
        target >= 0 ? this.api.event(session.id, target) : Promise.resolve(null),
        this.ui.showPartitions
          ? this.api.partitions(session.id, target, this.ui.radioRange)
          : Promise.resolve(null),
      ]);
      if (generation !== this.fetchGeneration) return; // stale: a newer jump won
      this.ui.state = state;
      this.ui.event = event;
      this.ui.partitions = partitions;
      this.ui.rawLine = event ? event.raw_line : "";
      this.ui.loading = false;
      if (this.ui.selectedNode !== null) {
        await this.refreshSelection(generation);
      }
      this.emit();
    } catch (error) {
      if (generation !== this.fetchGeneration) return;
      this.ui.loading = false;
      this.ui.notice = String(error);
      this.emit();
    }
  }

  private async refreshSelection(generation: number): Promise<void> {
    const session = this.ui.session;
    if (!session || this.ui.selectedNode === null) return;
    const payload = await this.api.notify(session.id, "node_clicked", this.ui.k, this.ui.selectedNode);
    if (generation !== this.fetchGeneration) return;
    this.ui.protocolPanel = payload.panel;
    this.ui.nodePanel = payload.node ?? null;
  }

  play(): void {
    if (this.ui.playing || !this.ui.session) return;
    this.ui.playing = true;
    this.armTimer();
    this.emit();
  }

  pause(): void {
    this.ui.playing = false;
    if (this.timer !== null) {
      this.scheduler.clearInterval(this.timer);
      this.timer = null;
    }
    this.emit();
  }

  togglePlay(): void {
    if (this.ui.playing) this.pause();
    else this.play();
  }

  private armTimer(): void {
    if (this.timer !== null) this.scheduler.clearInterval(this.timer);
    const interval = Math.max(10, 1000 / this.ui.speed);
    this.timer = this.scheduler.setInterval(() => void this.tick(), interval);
  }

  /** One playback step: advance k by one; pause at the end of the trace. */
  async tick(): Promise<void> {
    if (!this.ui.playing) return;
    if (this.ui.k >= this.lastEventIndex) {
      this.pause();
      return;
    }
    await this.jumpTo(this.ui.k + 1);
  }

  async step(delta: number): Promise<void> {
    this.pause();
    await this.jumpTo(this.ui.k + delta);
  }

  setSpeed(speed: number): void {
    this.ui.speed = Math.max(MIN_SPEED, Math.min(MAX_SPEED, speed));
    if (this.ui.playing) this.armTimer();
    this.emit();
  }

  async setFilters(showRouting: boolean, showAgent: boolean): Promise<void> {
    this.ui.showRouting = showRouting;
    this.ui.showAgent = showAgent;
    this.emit();
  }

  async setPartitions(show: boolean, radioRange?: number): Promise<void> {
    this.ui.showPartitions = show;
    if (radioRange !== undefined && radioRange >= 0) this.ui.radioRange = radioRange;
    if (!show) {
      this.ui.partitions = null;
      this.emit();
      return;
    }
    await this.jumpTo(this.ui.k);
  }

  /** Node click: select it and fetch its panels through notify. */
  async clickNode(nodeId: number): Promise<void> {
    const session = this.ui.session;
    if (!session) return;
    this.ui.selectedNode = nodeId;
    const generation = this.fetchGeneration;
    const payload = await this.api.notify(session.id, "node_clicked", this.ui.k, nodeId);
    if (generation !== this.fetchGeneration) return;
    this.applyNotify(payload);
  }

  /** Transmission arrow click: protocol packet view for the current event. */
  async clickTransmission(): Promise<void> {
    const session = this.ui.session;
    if (!session || this.ui.k < 0) return;
    const generation = this.fetchGeneration;
    const payload = await this.api.notify(session.id, "transmission_clicked", this.ui.k);
    if (generation !== this.fetchGeneration) return;
    this.applyNotify(payload);
  }

  private applyNotify(payload: NotifyPayload): void {
    this.ui.protocolPanel = payload.panel;
    if (payload.node) this.ui.nodePanel = payload.node;
    this.emit();
  }

  clearSelection(): void {
    this.ui.selectedNode = null;
    this.ui.protocolPanel = [];
    this.ui.nodePanel = null;
    this.emit();
  }

  zoomBy(factor: number): void {
    const zoom = Math.max(0.25, Math.min(16, this.ui.view.zoom * factor));
    this.ui.view = { ...this.ui.view, zoom };
    this.emit();
  }

  panBy(dx: number, dy: number): void {
    this.ui.view = { ...this.ui.view, panX: this.ui.view.panX + dx, panY: this.ui.view.panY + dy };
    this.emit();
  }

  resetView(): void {
    this.ui.view = { zoom: 1, panX: 0, panY: 0 };
    this.emit();
  }

  screenshotUrl(): string {
    const session = this.ui.session;
    if (!session) return "";
    return this.api.screenshotUrl(
      session.id,
      this.ui.k,
      this.ui.showPartitions ? this.ui.radioRange : undefined,
    );
  }
}
