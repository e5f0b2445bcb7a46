// Pure review-screen state: checklist answers, panel cycling, key mapping.
// Submission is blocked until every criterion has an explicit yes/no.

import type { QueueItem, Verdict, VerdictStatus } from "./types.js";

export type DependencyEntry = {
  name: string;
  status: VerdictStatus | "unrated";
};

export type KeyAction =
  | { kind: "submit"; status: VerdictStatus }
  | { kind: "panel"; delta: number }
  | { kind: "criterion"; index: number };

export function actionForKey(key: string): KeyAction | null {
  if (key === "p") return { kind: "submit", status: "pass" };
  if (key === "f") return { kind: "submit", status: "fail" };
  if (key === "n") return { kind: "submit", status: "not_run" };
  if (key === "ArrowRight") return { kind: "panel", delta: 1 };
  if (key === "ArrowLeft") return { kind: "panel", delta: -1 };
  if (/^[1-9]$/.test(key)) return { kind: "criterion", index: Number(key) - 1 };
  return null;
}

function makeUid(): string {
  const rand =
    globalThis.crypto && "randomUUID" in globalThis.crypto
      ? globalThis.crypto.randomUUID()
      : Math.random().toString(36).slice(2);
  return `web-${rand}`;
}

export class ReviewViewModel {
  readonly answers: (boolean | null)[];
  panelIndex = 0;

  constructor(
    readonly item: QueueItem,
    readonly raterId: string,
  ) {
    this.answers = item.criteria.map(() => null);
  }

  /** Every criterion answered explicitly; vacuously true for none. */
  get canSubmit(): boolean {
    return this.answers.every((a) => a !== null);
  }

  toggleCriterion(index: number): void {
    if (index < 0 || index >= this.answers.length) return;
    const current = this.answers[index];
    this.answers[index] = current === null ? true : !current;
  }

  cyclePanel(delta: number): void {
    const n = this.item.assets.length;
    if (n === 0) return;
    this.panelIndex = (this.panelIndex + delta + n) % n;
  }

  get currentAsset(): string | null {
    return this.item.assets[this.panelIndex] ?? null;
  }

  /** Banner rows for every ancestor, in the service's topological order. */
  dependencyEntries(): DependencyEntry[] {
    return Object.entries(this.item.dependency_statuses).map(([name, status]) => ({
      name,
      status: status ?? "unrated",
    }));
  }

  verdict(status: VerdictStatus, comment: string | null = null): Verdict {
    if (!this.canSubmit) {
      throw new Error("answer every criterion before submitting");
    }
    const checklist: Record<string, boolean> = {};
    this.item.criteria.forEach((criterion, i) => {
      checklist[criterion] = this.answers[i] === true;
    });
    return {
      entity: this.item.entity,
      node: this.item.node,
      unit: this.item.unit,
      status,
      rater_id: this.raterId,
      timestamp: new Date().toISOString(),
      checklist,
      comment,
      verdict_uid: makeUid(),
    };
  }
}
