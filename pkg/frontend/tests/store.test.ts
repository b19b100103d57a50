import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { PlaybackController } from "../src/store.js";
import { FakeServer, fixtures } from "./fake-server.js";

function makeController(server = new FakeServer()): { controller: PlaybackController; server: FakeServer } {
  const api = new ApiClient("", server.fetch);
  return { controller: new PlaybackController(api), server };
}

describe("session attach", () => {
  it("adopts the first open session with its preferences", async () => {
    const { controller } = makeController();
    await controller.start();
    expect(controller.ui.session?.id).toBe("fixture");
    expect(controller.ui.k).toBe(-1);
    expect(controller.ui.radioRange).toBe(250);
    expect(controller.ui.showRouting).toBe(true);
    expect(controller.lastEventIndex).toBe(fixtures.events.length - 1);
  });

  it("reports when no session is open", async () => {
    const server = new FakeServer();
    const emptyFetch = async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      if (url.endsWith("/sessions") && (!init || !init.method)) {
        return new Response(JSON.stringify({ sessions: [] }), { status: 200 });
      }
      return server.fetch(input, init);
    };
    const controller = new PlaybackController(new ApiClient("", emptyFetch));
    await controller.start();
    expect(controller.ui.session).toBeNull();
    expect(controller.ui.notice).toContain("no open session");
  });
});

describe("jumps", () => {
  it("fetches state and event for the target index", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.jumpTo(14);
    expect(controller.ui.k).toBe(14);
    expect(controller.ui.state?.event_index).toBe(14);
    expect(controller.ui.event?.event_index).toBe(14);
    expect(controller.ui.rawLine).toBe(fixtures.events[14].raw_line);
  });

  it("clamps out-of-range targets", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.jumpTo(99999);
    expect(controller.ui.k).toBe(fixtures.events.length - 1);
    await controller.jumpTo(-50);
    expect(controller.ui.k).toBe(-1);
    expect(controller.ui.rawLine).toBe("");
  });

  it("discards stale responses by generation", async () => {
    const { controller, server } = makeController();
    await controller.start();
    const release = server.gate("/state/5");
    const slow = controller.jumpTo(5);
    await controller.jumpTo(10);
    release();
    await slow;
    expect(controller.ui.k).toBe(10);
    expect(controller.ui.state?.event_index).toBe(10);
    expect(controller.ui.event?.event_index).toBe(10);
  });

  it("panels always reflect the displayed k", async () => {
    const { controller } = makeController();
    await controller.start();
    for (const k of [3, 17, 0, 29]) {
      await controller.jumpTo(k);
      expect(controller.ui.state?.event_index).toBe(k);
      expect(controller.ui.event?.transmission.rows.length).toBeGreaterThan(0);
    }
  });
});

describe("playback loop", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("advances k at the chosen speed and pauses at the end", async () => {
    const { controller } = makeController();
    await controller.start();
    controller.setSpeed(10); // 100 ms per event
    controller.play();
    expect(controller.ui.playing).toBe(true);
    await vi.advanceTimersByTimeAsync(350);
    expect(controller.ui.k).toBe(2);
    controller.pause();
    const frozen = controller.ui.k;
    await vi.advanceTimersByTimeAsync(500);
    expect(controller.ui.k).toBe(frozen);

    await controller.jumpTo(fixtures.events.length - 2);
    controller.play();
    await vi.advanceTimersByTimeAsync(400);
    expect(controller.ui.k).toBe(fixtures.events.length - 1);
    expect(controller.ui.playing).toBe(false); // auto-paused at the end
  });

  it("step moves one event and pauses playback", async () => {
    const { controller } = makeController();
    await controller.start();
    controller.play();
    await controller.step(1);
    expect(controller.ui.playing).toBe(false);
    expect(controller.ui.k).toBe(0);
    await controller.step(-1);
    expect(controller.ui.k).toBe(-1);
    await controller.step(-1); // clamped at the initial state
    expect(controller.ui.k).toBe(-1);
  });
});

describe("partitions and filters", () => {
  it("fetches partitions only when the overlay is on", async () => {
    const { controller, server } = makeController();
    await controller.start();
    await controller.jumpTo(14);
    expect(server.requestsTo("/partitions/")).toHaveLength(0);
    await controller.setPartitions(true, 120);
    expect(controller.ui.partitions?.radio_range).toBe(120);
    expect(controller.ui.partitions?.event_index).toBe(14);
    await controller.setPartitions(false);
    expect(controller.ui.partitions).toBeNull();
  });

  it("filter toggles never refetch state (display-only)", async () => {
    const { controller, server } = makeController();
    await controller.start();
    await controller.jumpTo(10);
    const before = server.requests.length;
    await controller.setFilters(false, true);
    await controller.setFilters(true, false);
    expect(server.requests.length).toBe(before);
    expect(controller.ui.showRouting).toBe(true);
    expect(controller.ui.showAgent).toBe(false);
  });
});

describe("interactions", () => {
  it("node click loads summary and protocol panels from notify", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.jumpTo(14);
    await controller.clickNode(11);
    expect(controller.ui.selectedNode).toBe(11);
    expect(controller.ui.nodePanel?.node_id).toBe(11);
    const table = controller.ui.protocolPanel.map(([, value]) => value).join("; ");
    expect(table).toContain("dest 19");
    expect(table).toContain("next hop 1");
  });

  it("selection follows the current event after a jump", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.jumpTo(29);
    await controller.clickNode(11);
    expect(controller.ui.protocolPanel.length).toBe(3); // refreshed table has 3 routes
    await controller.jumpTo(14);
    expect(controller.ui.nodePanel?.node_id).toBe(11);
    expect(controller.ui.protocolPanel.length).toBe(2); // table as of event 14
  });

  it("transmission click fills the protocol panel with the packet view", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.jumpTo(13);
    await controller.clickTransmission();
    const labels = controller.ui.protocolPanel.map(([label]) => label);
    expect(labels).toContain("Type");
    expect(controller.ui.protocolPanel.find(([label]) => label === "Type")?.[1]).toBe("REQUEST");
  });

  it("unsettled node click shows a grayed summary and empty table", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.clickNode(0); // at k = -1 nothing has settled
    expect(controller.ui.nodePanel?.grayed).toBe(true);
    expect(controller.ui.protocolPanel).toHaveLength(0);
  });
});

describe("view and screenshots", () => {
  it("zoom is clamped and resettable", async () => {
    const { controller } = makeController();
    for (let i = 0; i < 40; i++) controller.zoomBy(1.25);
    expect(controller.ui.view.zoom).toBeLessThanOrEqual(16);
    for (let i = 0; i < 80; i++) controller.zoomBy(0.8);
    expect(controller.ui.view.zoom).toBeGreaterThanOrEqual(0.25);
    controller.panBy(30, -10);
    controller.resetView();
    expect(controller.ui.view).toEqual({ zoom: 1, panX: 0, panY: 0 });
  });

  it("screenshot URL targets the displayed event and overlay range", async () => {
    const { controller } = makeController();
    await controller.start();
    await controller.jumpTo(14);
    expect(controller.screenshotUrl()).toBe("/sessions/fixture/screenshot/14.png");
    await controller.setPartitions(true, 250);
    expect(controller.screenshotUrl()).toBe("/sessions/fixture/screenshot/14.png?range=250");
  });
});
