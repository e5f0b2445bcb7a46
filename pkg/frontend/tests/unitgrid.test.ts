// Unit grid: per-bundle chips from live data, deep-link opening, bulk pass
// with confirmation; plus a 72-cell render against a stubbed client.

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { mountUnitGrid } from "../src/unitgrid.js";
import { mountApp, type App } from "../src/main.js";
import type { GraphView, QueueItem } from "../src/types.js";
import { startFixtureServer, type FixtureServer } from "./server.js";

let server: FixtureServer;
let app: App;

beforeAll(async () => {
  server = await startFixtureServer({ port: 18343 });
});

afterAll(() => {
  app?.dispose();
  server?.stop();
});

async function waitFor<T>(probe: () => T | null, what: string, ms = 15000): Promise<T> {
  const deadline = Date.now() + ms;
  for (;;) {
    const value = probe();
    if (value) return value;
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await new Promise((resolve) => setTimeout(resolve, 20));
  }
}

describe("unit grid (live service)", () => {
  it("renders per-unit verdict chips for the fixture's three bundles", async () => {
    const host = document.createElement("div");
    document.body.append(host);
    app = mountApp(host, { baseUrl: server.baseUrl, raterId: "viewer" });
    app.navigate("#/units/Tractseg/scan05");
    await waitFor(() => document.querySelector('[data-screen="unit-grid"] .cell'), "cells");

    const cells = document.querySelectorAll("[data-unit]");
    expect(cells.length).toBe(3);
    expect(
      document.querySelector('[data-unit="AF_right"]')?.getAttribute("data-status"),
    ).toBe("fail");
    expect(
      document.querySelector('[data-unit="ATR_left"]')?.getAttribute("data-status"),
    ).toBe("pass");
  });

  it("bulk-passes the remaining unrated bundles after confirmation", async () => {
    // scan07 has no Tractseg verdicts in the authored ledger.
    const host = document.createElement("div");
    document.body.append(host);
    const api = new ApiClient(server.baseUrl, "griduser");
    let asked = "";
    await mountUnitGrid(host, api, "Tractseg", "scan07", {
      confirm: (message) => {
        asked = message;
        return true;
      },
      onOpen: () => {},
    });
    const button = await waitFor(
      () => host.querySelector('[data-role="pass-remaining"]') as HTMLButtonElement,
      "bulk button",
    );
    expect(button.textContent).toContain("(3)");
    button.click();
    await waitFor(
      () =>
        host.querySelectorAll('[data-status="pass"]').length === 3 ? true : null,
      "all three bundles to turn pass",
    );
    expect(asked).toContain("3 unrated bundles");
    const item = await api.getItem("scan07.Tractseg.CC_5");
    expect(item.own_status).toBe("pass");
  });

  it("declines the bulk action when confirmation is refused", async () => {
    const host = document.createElement("div");
    document.body.append(host);
    const api = new ApiClient(server.baseUrl, "griduser");
    await mountUnitGrid(host, api, "Tractseg", "scan08", {
      confirm: () => false,
      onOpen: () => {},
    });
    const button = await waitFor(
      () => host.querySelector('[data-role="pass-remaining"]') as HTMLButtonElement,
      "bulk button",
    );
    button.click();
    await new Promise((resolve) => setTimeout(resolve, 150));
    const item = await api.getItem("scan08.Tractseg.CC_5");
    expect(item.own_status).toBeNull();
  });
});

describe("unit grid (stubbed 72-bundle node)", () => {
  it("renders one cell per declared unit", async () => {
    const units = Array.from({ length: 72 }, (_, i) => `BUNDLE_${String(i).padStart(2, "0")}`);
    const graph: GraphView = {
      order: ["Tractseg"],
      nodes: [
        {
          name: "Tractseg",
          deps: [],
          units,
          criteria: ["full appearance"],
          checks: [],
          artifacts: [],
          ancestors: [],
        },
      ],
    };
    const stub = {
      raterId: "viewer",
      graph: async () => graph,
      getItem: async (itemId: string): Promise<QueueItem> => ({
        item_id: itemId,
        entity: { subject_id: "s", session_id: "e", scan_id: "scanX" },
        node: "Tractseg",
        unit: itemId.split(".")[2],
        criteria: ["full appearance"],
        assets: [],
        diagnostics: [],
        dependency_statuses: {},
        own_status: null,
        lease: null,
      }),
      assetUrl: () => "",
      postVerdict: async () => true,
    } as unknown as ApiClient;

    const host = document.createElement("div");
    document.body.append(host);
    await mountUnitGrid(host, stub, "Tractseg", "scanX", {
      confirm: () => false,
      onOpen: () => {},
    });
    expect(host.querySelectorAll("[data-unit]").length).toBe(72);
  });
});
