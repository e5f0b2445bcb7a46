// Per-unit grid for bundle-granularity nodes: one cell per unit with its
// verdict chip and advisory flag; clicking deep-links into that unit's
// review. "Pass remaining" bulk-approves every unrated unit after an
// explicit confirmation.

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import type { QueueItem } from "./types.js";

export interface UnitGridOptions {
  confirm?: (message: string) => boolean;
  onOpen?: (itemId: string) => void;
}

export async function mountUnitGrid(
  container: HTMLElement,
  api: ApiClient,
  node: string,
  scanId: string,
  options: UnitGridOptions = {},
): Promise<void> {
  const confirmFn = options.confirm ?? ((message: string) => window.confirm(message));
  const onOpen = options.onOpen ?? ((itemId: string) => (location.hash = `#/item/${itemId}`));

  clear(container);
  const root = el("section", { class: "unit-grid", "data-screen": "unit-grid" });
  container.append(root);

  const graph = await api.graph();
  const nodeDef = graph.nodes.find((n) => n.name === node);
  if (!nodeDef || nodeDef.units.length === 0) {
    root.append(el("p", { "data-role": "banner" }, [`${node} has no units`]));
    return;
  }
  root.append(el("h2", {}, [`${scanId} / ${node}: ${nodeDef.units.length} bundles`]));

  const items = new Map<string, QueueItem>();
  const grid = el("div", { class: "grid", "data-role": "grid" });
  for (const unit of nodeDef.units) {
    const itemId = `${scanId}.${node}.${unit}`;
    const item = await api.getItem(itemId);
    items.set(unit, item);
    const status = item.own_status ?? "unrated";
    const advisory = item.diagnostics.find((d) => d.flag === "fail");
    const cell = el(
      "div",
      { class: "cell", "data-unit": unit, "data-status": status },
      [
        el("span", { class: "unit-name" }, [unit]),
        el("span", { class: `chip chip-${status}` }, [status]),
      ],
    );
    if (advisory) {
      cell.append(
        el("span", { class: "chip chip-advisory", "data-advisory": advisory.check_name }, [
          `advisory: ${advisory.details}`,
        ]),
      );
    }
    const thumb = item.assets[0];
    if (thumb) {
      cell.append(el("img", { src: api.assetUrl(itemId, thumb), alt: thumb }));
    }
    cell.addEventListener("click", () => onOpen(itemId));
    grid.append(cell);
  }
  root.append(grid);

  const unrated = [...items.entries()].filter(([, item]) => item.own_status === null);
  const bulk = el(
    "button",
    { "data-role": "pass-remaining", ...(unrated.length ? {} : { disabled: "" }) },
    [`pass remaining (${unrated.length})`],
  );
  bulk.addEventListener("click", () => {
    void (async () => {
      if (!confirmFn(`Mark ${unrated.length} unrated bundles of ${scanId} as pass?`)) return;
      for (const [unit, item] of unrated) {
        const checklist: Record<string, boolean> = {};
        for (const criterion of item.criteria) checklist[criterion] = true;
        await api.postVerdict(item.item_id, {
          entity: item.entity,
          node,
          unit,
          status: "pass",
          rater_id: api.raterId,
          timestamp: new Date().toISOString(),
          checklist,
          comment: "bulk pass from unit grid",
          verdict_uid: `web-bulk-${scanId}-${unit}-${Date.now()}`,
        });
      }
      await mountUnitGrid(container, api, node, scanId, options);
    })();
  });
  root.append(bulk);
}
