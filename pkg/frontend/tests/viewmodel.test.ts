import { describe, expect, it } from "vitest";

import { ReviewViewModel, actionForKey } from "../src/viewmodel.js";
import type { QueueItem } from "../src/types.js";

function item(overrides: Partial<QueueItem> = {}): QueueItem {
  return {
    item_id: "scan01.TensorAtlas",
    entity: { subject_id: "subA", session_id: "sesA1", scan_id: "scan01" },
    node: "TensorAtlas",
    unit: null,
    criteria: ["labels align", "mask centered"],
    assets: ["a.png", "b.png", "c.png"],
    diagnostics: [],
    dependency_statuses: { PreQual: "fail", SLANT: "pass" },
    own_status: null,
    lease: null,
    ...overrides,
  };
}

describe("key bindings", () => {
  it("maps the documented keys", () => {
    expect(actionForKey("p")).toEqual({ kind: "submit", status: "pass" });
    expect(actionForKey("f")).toEqual({ kind: "submit", status: "fail" });
    expect(actionForKey("n")).toEqual({ kind: "submit", status: "not_run" });
    expect(actionForKey("ArrowRight")).toEqual({ kind: "panel", delta: 1 });
    expect(actionForKey("ArrowLeft")).toEqual({ kind: "panel", delta: -1 });
    expect(actionForKey("3")).toEqual({ kind: "criterion", index: 2 });
    expect(actionForKey("x")).toBeNull();
    expect(actionForKey("0")).toBeNull();
  });
});

describe("checklist gating", () => {
  it("blocks submission until every criterion is answered", () => {
    const vm = new ReviewViewModel(item(), "r1");
    expect(vm.canSubmit).toBe(false);
    expect(() => vm.verdict("pass")).toThrow(/every criterion/);
    vm.toggleCriterion(0);
    expect(vm.canSubmit).toBe(false);
    vm.toggleCriterion(1);
    expect(vm.canSubmit).toBe(true);
  });

  it("toggle cycles unanswered -> yes -> no -> yes", () => {
    const vm = new ReviewViewModel(item(), "r1");
    expect(vm.answers[0]).toBeNull();
    vm.toggleCriterion(0);
    expect(vm.answers[0]).toBe(true);
    vm.toggleCriterion(0);
    expect(vm.answers[0]).toBe(false);
    vm.toggleCriterion(0);
    expect(vm.answers[0]).toBe(true);
  });

  it("is vacuously submittable with no criteria", () => {
    const vm = new ReviewViewModel(item({ criteria: [] }), "r1");
    expect(vm.canSubmit).toBe(true);
  });
});

describe("verdict body", () => {
  it("carries the item identity and the answered checklist", () => {
    const vm = new ReviewViewModel(item(), "raterZ");
    vm.toggleCriterion(0); // yes
    vm.toggleCriterion(1);
    vm.toggleCriterion(1); // no
    const verdict = vm.verdict("fail", "looks off");
    expect(verdict.node).toBe("TensorAtlas");
    expect(verdict.unit).toBeNull();
    expect(verdict.entity.scan_id).toBe("scan01");
    expect(verdict.status).toBe("fail");
    expect(verdict.rater_id).toBe("raterZ");
    expect(verdict.checklist).toEqual({ "labels align": true, "mask centered": false });
    expect(verdict.comment).toBe("looks off");
    expect(verdict.verdict_uid).toMatch(/^web-/);
    expect(Date.parse(verdict.timestamp)).not.toBeNaN();
  });
});

describe("panels and dependencies", () => {
  it("cycles panels in both directions with wrap-around", () => {
    const vm = new ReviewViewModel(item(), "r1");
    expect(vm.currentAsset).toBe("a.png");
    vm.cyclePanel(1);
    expect(vm.currentAsset).toBe("b.png");
    vm.cyclePanel(-1);
    vm.cyclePanel(-1);
    expect(vm.currentAsset).toBe("c.png");
  });

  it("lists every ancestor with unrated fallback", () => {
    const vm = new ReviewViewModel(
      item({ dependency_statuses: { PreQual: "fail", SLANT: null } }),
      "r1",
    );
    expect(vm.dependencyEntries()).toEqual([
      { name: "PreQual", status: "fail" },
      { name: "SLANT", status: "unrated" },
    ]);
  });
});
