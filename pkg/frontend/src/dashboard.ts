// Outcome dashboard: one bar per (node, unit) with the four category
// segments plus a separate pending count. Every number displayed comes
// verbatim from /api/report; the console never aggregates on its own.

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import { CATEGORIES, type Category } from "./types.js";

export const CATEGORY_LABELS: Record<Category, string> = {
  both_passed: "both passed",
  dep_passed_outcome_failed: "dep passed / outcome failed",
  dep_failed_outcome_passed: "dep failed / outcome passed",
  both_failed: "both failed",
  pending: "pending",
};

export async function mountDashboard(container: HTMLElement, api: ApiClient): Promise<void> {
  clear(container);
  const root = el("section", { class: "dashboard", "data-screen": "dashboard" });
  container.append(root);
  let report;
  try {
    report = await api.report();
  } catch (err) {
    root.append(el("div", { class: "banner", "data-role": "banner" }, [String(err)]));
    return;
  }

  root.append(
    el("p", { "data-role": "totals" }, [
      `${report.totals.scans} scans / ${report.totals.sessions} sessions / ` +
        `${report.totals.subjects} subjects`,
    ]),
  );

  if (report.groups.length === 0) {
    root.append(el("p", { "data-role": "empty-state" }, ["no report data yet"]));
    return;
  }

  for (const group of report.groups) {
    const key = group.unit ? `${group.node}/${group.unit}` : group.node;
    const row = el("div", {
      class: "report-row",
      "data-node": group.node,
      "data-unit": group.unit ?? "",
    });
    row.append(el("h3", {}, [key]));

    const attrs: Record<string, string> = { class: "bar" };
    for (const category of CATEGORIES) {
      attrs[`data-count-${category}`] = String(group.counts[category] ?? 0);
    }
    const bar = el("div", attrs);
    const rated = group.rated;
    for (const category of CATEGORIES.filter((c) => c !== "pending")) {
      const count = group.counts[category] ?? 0;
      if (count === 0) continue;
      const width = rated > 0 ? (100 * count) / rated : 0;
      bar.append(
        el(
          "span",
          {
            class: `seg seg-${category}`,
            style: `width:${width.toFixed(2)}%`,
            title: `${CATEGORY_LABELS[category]}: ${count}`,
          },
          [String(count)],
        ),
      );
    }
    row.append(bar);
    row.append(
      el("p", { class: "pending-note" }, [
        `rated ${rated}, pending ${group.counts.pending ?? 0}`,
      ]),
    );
    root.append(row);
  }
}
