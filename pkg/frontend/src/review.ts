// Review screen: one item at a time, keyboard-first, auto-advancing.
//
// Keys: p = pass, f = fail, n = not run, arrow keys cycle panels,
// digits 1..9 toggle checklist lines. Submitting posts the verdict and
// fetches the next item; errors keep the current state on screen.

import { ApiClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import type { QueueItem, VerdictStatus } from "./types.js";
import { ReviewViewModel, actionForKey } from "./viewmodel.js";

export interface ReviewScreen {
  refresh(): Promise<void>;
  dispose(): void;
  readonly viewModel: ReviewViewModel | null;
}

type Mode = { kind: "queue" } | { kind: "single"; itemId: string };

export function mountReview(
  container: HTMLElement,
  api: ApiClient,
  mode: Mode = { kind: "queue" },
): ReviewScreen {
  let vm: ReviewViewModel | null = null;
  let banner: { text: string; retry: boolean } | null = null;
  let done = false;
  let disposed = false;

  async function loadNext(): Promise<void> {
    try {
      const item =
        mode.kind === "queue" ? await api.nextItem() : await api.getItem(mode.itemId);
      if (item === null) {
        vm = null;
        done = true;
      } else {
        vm = new ReviewViewModel(item, api.raterId);
        done = false;
      }
      banner = null;
    } catch (err) {
      banner = { text: describe(err), retry: true };
    }
    render();
  }

  function describe(err: unknown): string {
    if (err instanceof ApiError) return `${err.status}: ${err.message}`;
    return err instanceof Error ? err.message : String(err);
  }

  async function submit(status: VerdictStatus): Promise<void> {
    if (!vm || !vm.canSubmit) {
      banner = { text: "answer every criterion before submitting", retry: false };
      render();
      return;
    }
    const itemId = vm.item.item_id;
    try {
      await api.postVerdict(itemId, vm.verdict(status));
    } catch (err) {
      banner = { text: describe(err), retry: err instanceof ApiError ? false : true };
      render();
      return;
    }
    if (mode.kind === "queue") {
      await loadNext();
    } else {
      banner = { text: `verdict recorded for ${itemId}`, retry: false };
      await refreshCurrent();
    }
  }

  async function refreshCurrent(): Promise<void> {
    if (mode.kind === "single") {
      try {
        const item = await api.getItem(mode.itemId);
        vm = new ReviewViewModel(item, api.raterId);
      } catch (err) {
        banner = { text: describe(err), retry: true };
      }
    }
    render();
  }

  function onKey(event: KeyboardEvent): void {
    const action = actionForKey(event.key);
    if (!action || !vm) return;
    if (action.kind === "submit") void submit(action.status);
    else if (action.kind === "panel") {
      vm.cyclePanel(action.delta);
      render();
    } else {
      vm.toggleCriterion(action.index);
      render();
    }
  }

  function statusChip(name: string, status: string): HTMLElement {
    return el(
      "span",
      { class: `chip chip-${status}`, "data-dep": name, "data-status": status },
      [`${name}: ${status}`],
    );
  }

  function render(): void {
    if (disposed) return;  // a stale fetch must not clobber the next screen
    clear(container);
    const root = el("section", { class: "review", "data-screen": "review" });
    if (banner) {
      const box = el("div", { class: "banner", "data-role": "banner" }, [banner.text]);
      if (banner.retry) {
        const retry = el("button", { "data-role": "retry" }, ["retry"]);
        retry.addEventListener("click", () => void loadNext());
        box.append(retry);
      }
      root.append(box);
    }
    if (done) {
      root.append(el("p", { class: "empty", "data-role": "queue-empty" }, ["queue empty"]));
      container.append(root);
      return;
    }
    if (!vm) {
      root.append(el("p", {}, ["loading..."]));
      container.append(root);
      return;
    }
    const item: QueueItem = vm.item;
    const title = item.unit
      ? `${item.entity.scan_id} / ${item.node} / ${item.unit}`
      : `${item.entity.scan_id} / ${item.node}`;
    root.append(
      el("h2", { "data-role": "item-title", "data-item-id": item.item_id }, [title]),
    );

    // Dependency banner: every ancestor, color-coded, always visible.
    const deps = el("div", { class: "deps", "data-role": "dependency-banner" });
    const entries = vm.dependencyEntries();
    if (entries.length === 0) {
      deps.append(el("span", { class: "chip chip-none" }, ["no dependencies"]));
    }
    for (const entry of entries) deps.append(statusChip(entry.name, entry.status));
    root.append(deps);

    // Advisory diagnostics (never authoritative).
    if (item.diagnostics.length > 0) {
      const diag = el("ul", { class: "diagnostics", "data-role": "diagnostics" });
      for (const record of item.diagnostics) {
        diag.append(
          el("li", { class: `flag-${record.flag}`, "data-check": record.check_name }, [
            `${record.check_name} [${record.flag}] ${record.details}`,
          ]),
        );
      }
      root.append(diag);
    }

    // Panel viewer.
    const viewer = el("div", { class: "viewer" });
    if (vm.currentAsset) {
      viewer.append(
        el("img", {
          src: api.assetUrl(item.item_id, vm.currentAsset),
          alt: vm.currentAsset,
          "data-role": "panel",
          "data-asset": vm.currentAsset,
        }),
        el("p", { class: "asset-name" }, [
          `${vm.panelIndex + 1}/${item.assets.length} ${vm.currentAsset}`,
        ]),
      );
    } else {
      viewer.append(el("p", { "data-role": "no-panels" }, ["no panels rendered"]));
    }
    root.append(viewer);

    // Criteria checklist; digits toggle, clicks too.
    const list = el("ol", { class: "criteria", "data-role": "criteria" });
    item.criteria.forEach((criterion, i) => {
      const state = vm!.answers[i];
      const label = state === null ? "unanswered" : state ? "yes" : "no";
      const entry = el(
        "li",
        { "data-criterion": String(i), "data-answer": label },
        [`${i + 1}. ${criterion} [${label}]`],
      );
      entry.addEventListener("click", () => {
        vm!.toggleCriterion(i);
        render();
      });
      list.append(entry);
    });
    root.append(list);

    // Verdict buttons mirror the keyboard.
    const controls = el("div", { class: "controls" });
    (["pass", "fail", "not_run"] as VerdictStatus[]).forEach((status) => {
      const button = el(
        "button",
        { "data-verdict": status, ...(vm!.canSubmit ? {} : { disabled: "" }) },
        [status === "not_run" ? "not run (n)" : `${status} (${status[0]})`],
      );
      button.addEventListener("click", () => void submit(status));
      controls.append(button);
    });
    root.append(controls);
    container.append(root);
  }

  document.addEventListener("keydown", onKey);
  void loadNext();

  return {
    refresh: loadNext,
    dispose: () => {
      disposed = true;
      document.removeEventListener("keydown", onKey);
    },
    get viewModel() {
      return vm;
    },
  };
}
