// Hash-routed shell: #/review (default), #/dashboard, #/units/<node>/<scan>,
// #/item/<itemId>. All state lives server-side; a reload loses nothing.

import { ApiClient } from "./api.js";
import { mountDashboard } from "./dashboard.js";
import { clear, el } from "./dom.js";
import { mountReview, type ReviewScreen } from "./review.js";
import { mountUnitGrid } from "./unitgrid.js";

export interface AppOptions {
  baseUrl?: string;
  raterId?: string;
  token?: string;
}

export interface App {
  api: ApiClient;
  navigate(hash: string): void;
  dispose(): void;
  currentScreen(): ReviewScreen | null;
}

export function mountApp(root: HTMLElement, options: AppOptions = {}): App {
  const api = new ApiClient(
    options.baseUrl ?? "",
    options.raterId ?? "anonymous",
    options.token,
  );
  let review: ReviewScreen | null = null;

  const nav = el("nav", {}, []);
  for (const [label, hash] of [
    ["review", "#/review"],
    ["dashboard", "#/dashboard"],
  ] as const) {
    const link = el("a", { href: hash, "data-nav": label }, [label]);
    nav.append(link);
  }
  const outlet = el("main", { "data-role": "outlet" });
  root.append(nav, outlet);

  function route(): void {
    review?.dispose();
    review = null;
    clear(outlet);
    const hash = location.hash || "#/review";
    const parts = hash.replace(/^#\//, "").split("/");
    if (parts[0] === "dashboard") {
      void mountDashboard(outlet, api);
    } else if (parts[0] === "units" && parts.length >= 3) {
      void mountUnitGrid(outlet, api, parts[1], parts[2]);
    } else if (parts[0] === "item" && parts.length >= 2) {
      review = mountReview(outlet, api, { kind: "single", itemId: parts[1] });
    } else {
      review = mountReview(outlet, api, { kind: "queue" });
    }
  }

  window.addEventListener("hashchange", route);
  route();

  return {
    api,
    navigate(hash: string) {
      if (location.hash === hash) route();
      else location.hash = hash;
    },
    dispose() {
      window.removeEventListener("hashchange", route);
      review?.dispose();
    },
    currentScreen: () => review,
  };
}
