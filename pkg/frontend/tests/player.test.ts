import { describe, expect, it } from "vitest";

import { buildPlayer, cumulativeDuration } from "../src/player.js";
import { flattenComparison, flattenVariation, reasonLabel } from "../src/inspector.js";
import type { ComparisonDoc, TraceDoc } from "../src/types.js";

const TRACE: TraceDoc = {
  entries: [
    {
      skill: { template: "Pour", bindings: { source: "C1", dest: "B", amount: 0.1 }, duration: 1.0 },
      pre_digest: "a", post_digest: "b", duration: 1.0, preconditions_passed: true,
      levels: { B: 0.16, C1: 0.0, C2: 0.02, M: 0.1 },
    },
    {
      skill: { template: "Pour", bindings: { source: "C2", dest: "B", amount: 0.02 }, duration: 0.2 },
      pre_digest: "b", post_digest: "c", duration: 0.2, preconditions_passed: true,
      levels: { B: 0.18, C1: 0.0, C2: 0.0, M: 0.1 },
    },
    {
      skill: { template: "Pour", bindings: { source: "M", dest: "B", amount: 0.1 }, duration: 1.0 },
      pre_digest: "c", post_digest: "d", duration: 1.0, preconditions_passed: true,
      levels: { B: 0.28, C1: 0.0, C2: 0.0, M: 0.0 },
    },
  ],
  total_duration: 2.2,
  final_env: { instances: [] },
  verdict: { status: "Satisfied" },
  failure: null,
  initial_levels: { B: 0.06, C1: 0.1, C2: 0.02, M: 0.1 },
};

describe("plan player", () => {
  it("total equals the sum of step durations and the trace total", () => {
    const model = buildPlayer(TRACE);
    expect(cumulativeDuration(TRACE)).toBeCloseTo(2.2, 9);
    expect(model.totalDuration).toBeCloseTo(TRACE.total_duration, 9);
  });

  it("exposes one frame per step plus the initial state", () => {
    const model = buildPlayer(TRACE);
    expect(model.frames).toHaveLength(4);
    expect(model.frames[0].levels["B"]).toBeCloseTo(0.06);
    expect(model.frames[3].levels["B"]).toBeCloseTo(0.28);
    expect(model.frames[3].elapsed).toBeCloseTo(2.2, 9);
    expect(model.containers).toEqual(["B", "C1", "C2", "M"]);
    expect(model.verdict).toBe("Satisfied");
  });

  it("labels steps with skill, endpoints and amount", () => {
    const model = buildPlayer(TRACE);
    expect(model.frames[1].label).toBe("Pour C1 -> B (0.1 L)");
  });
});

const FAILING: ComparisonDoc = {
  equal: false,
  target: { type: "Interval", lower: 6, upper: 10, lower_closed: true, upper_closed: true },
  value: { type: "Integer", value: 4 },
  reasons: [
    { kind: "BoundViolation", predicate: { op: "LessEqual", args: [6, 4] }, expected: true, actual: false },
  ],
  sub_comparisons: [
    {
      label: "Pose",
      comparison: {
        equal: true,
        target: { type: "Pose" },
        value: { type: "Pose" },
        reasons: [],
        sub_comparisons: [],
      },
    },
  ],
};

describe("comparison inspector", () => {
  it("formats failing reasons in predicate style", () => {
    expect(reasonLabel(FAILING.reasons[0])).toBe(
      "BoundViolation: LessEqual(6, 4) expected true, got false",
    );
  });

  it("flattens the tree with depths and pass/fail flags", () => {
    const rows = flattenComparison(FAILING);
    expect(rows).toHaveLength(2);
    expect(rows[0].equal).toBe(false);
    expect(rows[0].summary).toContain("[6, 10]");
    expect(rows[1].depth).toBe(1);
    expect(rows[1].equal).toBe(true);
  });

  it("renders the goal variation tree shape", () => {
    const rows = flattenVariation({
      type: "EnvironmentDataRangeEntityVariation",
      entities: {
        type: "MapRangeInstanceSubset",
        elements: [
          {
            type: "InstanceRangePropertiesVariation",
            concept: { type: "ConceptVariation", base: "LiquidContainer", include_subconcepts: true },
            properties: {
              contentLevel: {
                type: "Interval", lower: 0.28, upper: 0.32, lower_closed: true, upper_closed: true,
              },
            },
          },
        ],
      },
    });
    expect(rows.map((r) => r.label)).toEqual([
      "goal: EnvironmentDataRangeEntityVariation",
      "entities: MapRangeInstanceSubset",
      "element[0]: InstanceRangePropertiesVariation",
      "concept: ConceptVariation",
      "contentLevel: Interval",
    ]);
    expect(rows[3].summary).toBe("LiquidContainer (and subconcepts)");
    expect(rows[4].summary).toBe("[0.28, 0.32]");
  });
});
