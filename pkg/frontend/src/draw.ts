// Client-side frame drawing. Styling only, never semantics: node
// positions, settlement, partitions and the current event all come from
// API responses, and arrow styles come from the style table the server
// exported at session open.

import type { UiState } from "./store.js";
import type { ArrowStyle, NodePayload, PrefsPayload } from "./types.js";

export const NODE_RADIUS = 6;
export const RING_RADIUS = 18;
const PARTITION_ALPHA = 70 / 255;

export interface Camera {
  scale: number; // pixels per meter, includes zoom
  offsetX: number;
  offsetY: number;
  height: number;
}

/** Fit the terrain into the canvas, then apply the user's pan/zoom. */
export function camera(ui: UiState, width: number, height: number): Camera {
  const prefs = ui.session?.prefs;
  const [terrainW, terrainH] = prefs ? prefs.terrain : [1000, 1000];
  const fit = Math.min(width / (terrainW || 1), height / (terrainH || 1));
  const scale = fit * ui.view.zoom;
  return { scale, offsetX: ui.view.panX, offsetY: ui.view.panY, height };
}

export function worldToPx(cam: Camera, x: number, y: number): [number, number] {
  return [x * cam.scale + cam.offsetX, cam.height - y * cam.scale + cam.offsetY];
}

export function pxToWorld(cam: Camera, px: number, py: number): [number, number] {
  return [(px - cam.offsetX) / cam.scale, (cam.height - (py - cam.offsetY)) / cam.scale];
}

function color(prefs: PrefsPayload | undefined, key: string, fallback = "#000000"): string {
  const value = prefs?.colors[key];
  return typeof value === "string" ? value : fallback;
}

function withAlpha(hex: string, alpha: number): string {
  const r = parseInt(hex.slice(1, 3), 16);
  const g = parseInt(hex.slice(3, 5), 16);
  const b = parseInt(hex.slice(5, 7), 16);
  return `rgba(${r}, ${g}, ${b}, ${alpha})`;
}

export function styleFor(ui: UiState): ArrowStyle | null {
  const event = ui.event;
  const session = ui.session;
  if (!event || !session) return null;
  const broadcast = event.hop_dst === null || event.hop_dst < 0;
  const key = `${event.layer}:${event.action}:${broadcast ? "bcast" : "ucast"}`;
  return session.styles[key] ?? null;
}

function filteredOut(ui: UiState): boolean {
  const layer = ui.event?.layer;
  if (layer === "RTR" && !ui.showRouting) return true;
  if (layer === "AGT" && !ui.showAgent) return true;
  return false;
}

export function drawFrame(ctx: CanvasRenderingContext2D, ui: UiState, width: number, height: number): void {
  const prefs = ui.session?.prefs;
  const cam = camera(ui, width, height);
  ctx.fillStyle = color(prefs, "background", "#ffffff");
  ctx.fillRect(0, 0, width, height);
  if (!ui.state) return;

  if (ui.partitions && ui.showPartitions) {
    const palette = prefs?.colors.partition_palette ?? ["#e6194b"];
    for (const component of ui.partitions.components) {
      ctx.fillStyle = withAlpha(palette[component.color_key % palette.length], PARTITION_ALPHA);
      for (const disk of component.disks) {
        const [cx, cy] = worldToPx(cam, disk.x, disk.y);
        ctx.beginPath();
        ctx.arc(cx, cy, Math.max(1, disk.r * cam.scale), 0, Math.PI * 2);
        ctx.fill();
      }
    }
  }

  drawTransmission(ctx, ui, cam);

  const nodeFill = color(prefs, "node_default", "#283c5a");
  const grayFill = color(prefs, "node_grayed", "#aaaaaa");
  ctx.font = "11px sans-serif";
  ctx.textBaseline = "bottom";
  for (const node of ui.state.nodes) {
    const [cx, cy] = worldToPx(cam, node.pos[0], node.pos[1]);
    const fill = node.settled ? nodeFill : grayFill;
    ctx.fillStyle = fill;
    ctx.beginPath();
    ctx.arc(cx, cy, NODE_RADIUS, 0, Math.PI * 2);
    ctx.fill();
    if (node.node_id === ui.selectedNode) {
      ctx.strokeStyle = fill;
      ctx.lineWidth = 1.5;
      ctx.setLineDash([2, 2]);
      ctx.beginPath();
      ctx.arc(cx, cy, NODE_RADIUS + 3, 0, Math.PI * 2);
      ctx.stroke();
      ctx.setLineDash([]);
    }
    ctx.fillText(String(node.node_id), cx + NODE_RADIUS + 2, cy - 2);
  }
}

function drawTransmission(ctx: CanvasRenderingContext2D, ui: UiState, cam: Camera): void {
  const event = ui.event;
  const style = styleFor(ui);
  if (!event || !style || !ui.state || filteredOut(ui)) return;
  const prefs = ui.session?.prefs;
  const stroke = color(prefs, style.color_key, "#ff0000");
  const width = style.thickness === "fat" ? 4 : 2;
  const byId = new Map(ui.state.nodes.map((node) => [node.node_id, node] as const));

  if (style.glyph === "node-highlight" || style.glyph === "ring") {
    const node = byId.get(event.node_id);
    if (!node) return;
    const [cx, cy] = worldToPx(cam, node.pos[0], node.pos[1]);
    const radius = style.glyph === "ring" ? RING_RADIUS : NODE_RADIUS + 4;
    ctx.strokeStyle = stroke;
    ctx.lineWidth = width;
    ctx.setLineDash([]);
    ctx.beginPath();
    ctx.arc(cx, cy, radius, 0, Math.PI * 2);
    ctx.stroke();
    return;
  }

  const endpoints = arrowEndpoints(ui);
  if (!endpoints) return;
  const [p0, p1] = [worldToPx(cam, ...endpoints[0]), worldToPx(cam, ...endpoints[1])];
  ctx.strokeStyle = stroke;
  ctx.lineWidth = width;
  ctx.setLineDash(style.dash === "dashed" ? [6, 4] : []);
  ctx.beginPath();
  ctx.moveTo(p0[0], p0[1]);
  ctx.lineTo(p1[0], p1[1]);
  ctx.stroke();
  ctx.setLineDash([]);
  drawArrowHead(ctx, p0, p1, stroke);
}

/** World coordinates of the current arrow's endpoints, if it has any. */
export function arrowEndpoints(ui: UiState): [[number, number], [number, number]] | null {
  const event = ui.event;
  if (!event || !ui.state) return null;
  if (event.hop_src === null || event.hop_dst === null || event.hop_dst < 0) return null;
  const byId = new Map(ui.state.nodes.map((node) => [node.node_id, node] as const));
  const src = byId.get(event.hop_src);
  const dst = byId.get(event.hop_dst);
  if (!src || !dst) return null;
  return [
    [src.pos[0], src.pos[1]],
    [dst.pos[0], dst.pos[1]],
  ];
}

function drawArrowHead(
  ctx: CanvasRenderingContext2D,
  p0: [number, number],
  p1: [number, number],
  fill: string,
  size = 9,
): void {
  const dx = p1[0] - p0[0];
  const dy = p1[1] - p0[1];
  const length = Math.hypot(dx, dy);
  if (length === 0) return;
  const ux = dx / length;
  const uy = dy / length;
  ctx.fillStyle = fill;
  ctx.beginPath();
  ctx.moveTo(p1[0], p1[1]);
  ctx.lineTo(p1[0] - ux * size - (uy * size) / 2, p1[1] - uy * size + (ux * size) / 2);
  ctx.lineTo(p1[0] - ux * size + (uy * size) / 2, p1[1] - uy * size - (ux * size) / 2);
  ctx.closePath();
  ctx.fill();
}

/** Node within click range of a canvas pixel, nearest first. */
export function hitTestNode(ui: UiState, cam: Camera, px: number, py: number): NodePayload | null {
  if (!ui.state) return null;
  let best: NodePayload | null = null;
  let bestDistance = Infinity;
  for (const node of ui.state.nodes) {
    const [cx, cy] = worldToPx(cam, node.pos[0], node.pos[1]);
    const distance = Math.hypot(cx - px, cy - py);
    if (distance <= NODE_RADIUS + 3 && distance < bestDistance) {
      best = node;
      bestDistance = distance;
    }
  }
  return best;
}

/** True when a canvas pixel lies on the current transmission arrow. */
export function hitTestArrow(ui: UiState, cam: Camera, px: number, py: number): boolean {
  if (filteredOut(ui)) return false;
  const endpoints = arrowEndpoints(ui);
  if (!endpoints) return false;
  const [a, b] = [worldToPx(cam, ...endpoints[0]), worldToPx(cam, ...endpoints[1])];
  const lengthSq = (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2;
  let t = 0;
  if (lengthSq > 0) {
    t = ((px - a[0]) * (b[0] - a[0]) + (py - a[1]) * (b[1] - a[1])) / lengthSq;
    t = Math.max(0, Math.min(1, t));
  }
  const qx = a[0] + t * (b[0] - a[0]);
  const qy = a[1] + t * (b[1] - a[1]);
  return Math.hypot(px - qx, py - qy) <= 6;
}
