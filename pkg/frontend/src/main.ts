// Bootstrap: wire the controller to the DOM, the canvas, the slider and
// the keyboard shortcuts. Everything displayed originates from the API.

import { ApiClient } from "./api.js";
import { camera, drawFrame, hitTestArrow, hitTestNode } from "./draw.js";
import { renderPanels, type PanelElements } from "./panels.js";
import { PlaybackController } from "./store.js";

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing element #${id}`);
  return element as T;
}

export function bootstrap(root: Document = document): PlaybackController {
  const api = new ApiClient("");
  const controller = new PlaybackController(api);

  const canvas = byId<HTMLCanvasElement>("terrain");
  const slider = byId<HTMLInputElement>("event-slider");
  const eventLabel = byId<HTMLSpanElement>("event-label");
  const playButton = byId<HTMLButtonElement>("play");
  const stepBack = byId<HTMLButtonElement>("step-back");
  const stepForward = byId<HTMLButtonElement>("step-forward");
  const speedInput = byId<HTMLInputElement>("speed");
  const routingFilter = byId<HTMLInputElement>("filter-routing");
  const agentFilter = byId<HTMLInputElement>("filter-agent");
  const partitionsToggle = byId<HTMLInputElement>("partitions-toggle");
  const rangeInput = byId<HTMLInputElement>("radio-range");
  const zoomIn = byId<HTMLButtonElement>("zoom-in");
  const zoomOut = byId<HTMLButtonElement>("zoom-out");
  const zoomReset = byId<HTMLButtonElement>("zoom-reset");
  const screenshotLink = byId<HTMLAnchorElement>("screenshot");
  const noticeBar = byId<HTMLElement>("notice");
  const titleBar = byId<HTMLElement>("trace-title");

  const panels: PanelElements = {
    network: byId("panel-network"),
    node: byId("panel-node"),
    transmission: byId("panel-transmission"),
    protocol: byId("panel-protocol"),
    rawLine: byId("raw-line"),
  };

  function redraw(): void {
    const ui = controller.ui;
    const ctx = canvas.getContext("2d");
    if (ctx) drawFrame(ctx, ui, canvas.width, canvas.height);
    renderPanels(panels, ui);
    slider.min = "-1";
    slider.max = String(controller.lastEventIndex);
    slider.value = String(ui.k);
    eventLabel.textContent = `event ${ui.k} / ${controller.lastEventIndex}`;
    playButton.textContent = ui.playing ? "pause" : "play";
    noticeBar.textContent = ui.notice;
    noticeBar.style.display = ui.notice ? "block" : "none";
    if (ui.session) {
      titleBar.textContent = `${ui.session.path} — ${ui.session.total_events} events` +
        (ui.session.protocol ? ` — ${ui.session.protocol}` : "");
      screenshotLink.href = controller.screenshotUrl();
      screenshotLink.download = `frame_${ui.k}.png`;
    }
  }

  controller.subscribe(redraw);

  playButton.addEventListener("click", () => controller.togglePlay());
  stepBack.addEventListener("click", () => void controller.step(-1));
  stepForward.addEventListener("click", () => void controller.step(1));
  slider.addEventListener("input", () => {
    controller.pause();
    void controller.jumpTo(Number(slider.value));
  });
  speedInput.addEventListener("change", () => controller.setSpeed(Number(speedInput.value)));
  routingFilter.addEventListener("change", () =>
    void controller.setFilters(routingFilter.checked, agentFilter.checked),
  );
  agentFilter.addEventListener("change", () =>
    void controller.setFilters(routingFilter.checked, agentFilter.checked),
  );
  partitionsToggle.addEventListener("change", () =>
    void controller.setPartitions(partitionsToggle.checked, Number(rangeInput.value)),
  );
  rangeInput.addEventListener("change", () =>
    void controller.setPartitions(partitionsToggle.checked, Number(rangeInput.value)),
  );
  zoomIn.addEventListener("click", () => controller.zoomBy(1.25));
  zoomOut.addEventListener("click", () => controller.zoomBy(0.8));
  zoomReset.addEventListener("click", () => controller.resetView());

  canvas.addEventListener("click", (mouse: MouseEvent) => {
    const rect = canvas.getBoundingClientRect();
    const px = mouse.clientX - rect.left;
    const py = mouse.clientY - rect.top;
    const cam = camera(controller.ui, canvas.width, canvas.height);
    const node = hitTestNode(controller.ui, cam, px, py);
    if (node) {
      void controller.clickNode(node.node_id);
      return;
    }
    if (hitTestArrow(controller.ui, cam, px, py)) {
      void controller.clickTransmission();
      return;
    }
    controller.clearSelection();
  });

  root.addEventListener("keydown", (key: KeyboardEvent) => {
    if ((key.target as HTMLElement | null)?.tagName === "INPUT") return;
    switch (key.key) {
      case " ":
        key.preventDefault();
        controller.togglePlay();
        break;
      case "ArrowRight":
        void controller.step(1);
        break;
      case "ArrowLeft":
        void controller.step(-1);
        break;
      case "Home":
        void controller.jumpTo(-1);
        break;
      case "End":
        void controller.jumpTo(controller.lastEventIndex);
        break;
      case "+":
      case "=":
        controller.zoomBy(1.25);
        break;
      case "-":
        controller.zoomBy(0.8);
        break;
      case "0":
        controller.resetView();
        break;
      case "p":
        partitionsToggle.checked = !partitionsToggle.checked;
        void controller.setPartitions(partitionsToggle.checked, Number(rangeInput.value));
        break;
    }
  });

  void controller.start().then(() => {
    rangeInput.value = String(controller.ui.radioRange);
    routingFilter.checked = controller.ui.showRouting;
    agentFilter.checked = controller.ui.showAgent;
    speedInput.value = String(controller.ui.speed);
    redraw();
  });
  return controller;
}

declare global {
  interface Window {
    traceplay?: PlaybackController;
  }
}

if (typeof document !== "undefined" && document.getElementById("terrain")) {
  window.traceplay = bootstrap();
}
