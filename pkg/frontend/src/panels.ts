// The four property panels: network statistics, node properties,
// transmission properties, routing-protocol properties. Pure DOM
// rendering of API response rows.

import type { UiState } from "./store.js";
import type { CounterDict, PanelRows } from "./types.js";

function renderRows(table: HTMLElement, rows: PanelRows, empty: string): void {
  table.textContent = "";
  if (rows.length === 0) {
    const div = document.createElement("div");
    div.className = "panel-empty";
    div.textContent = empty;
    table.appendChild(div);
    return;
  }
  for (const [label, value] of rows) {
    const row = document.createElement("div");
    row.className = "panel-row";
    const labelCell = document.createElement("span");
    labelCell.className = "panel-label";
    labelCell.textContent = label;
    const valueCell = document.createElement("span");
    valueCell.className = "panel-value";
    valueCell.textContent = value;
    row.append(labelCell, valueCell);
    table.appendChild(row);
  }
}

function counterRows(prefix: string, counters: CounterDict): PanelRows {
  return [
    [`${prefix} sent`, String(counters.sent)],
    [`${prefix} received`, String(counters.received)],
    [`${prefix} forwarded`, String(counters.forwarded)],
    [`${prefix} dropped`, String(counters.dropped)],
  ];
}

export function networkStatsRows(ui: UiState): PanelRows {
  if (!ui.state) return [];
  const network = ui.state.network;
  return [
    ...counterRows("Routing", network.routing),
    ...counterRows("Agent", network.agent),
    ["Agent CBR bytes", String(network.agent_breakdown.cbr)],
    ["Agent TCP/ACK bytes", String(network.agent_breakdown.tcp_ack)],
    ["Agent other bytes", String(network.agent_breakdown.other)],
  ];
}

export function nodeRows(ui: UiState): PanelRows {
  if (!ui.nodePanel) return [];
  const header: PanelRows = [["Node", String(ui.nodePanel.node_id) + (ui.nodePanel.grayed ? " (grayed)" : "")]];
  return header.concat(ui.nodePanel.rows);
}

export function transmissionRows(ui: UiState): PanelRows {
  return ui.event ? ui.event.transmission.rows : [];
}

export interface PanelElements {
  network: HTMLElement;
  node: HTMLElement;
  transmission: HTMLElement;
  protocol: HTMLElement;
  rawLine: HTMLElement;
}

export function renderPanels(elements: PanelElements, ui: UiState): void {
  renderRows(elements.network, networkStatsRows(ui), "no state loaded");
  renderRows(elements.node, nodeRows(ui), "click a node");
  renderRows(elements.transmission, transmissionRows(ui), "no event shown");
  renderRows(elements.protocol, ui.protocolPanel, "no protocol data");
  elements.rawLine.textContent = ui.rawLine || "(initial state: no trace line)";
}
