import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { configHash, informativeness, rankEntries, stableStringify } from "../src/stats.js";
import type { BPPDocument, SweepDocument, UtilityWeights } from "../src/types.js";

const sweep: SweepDocument = JSON.parse(
  readFileSync(new URL("../fixtures/sweep.json", import.meta.url), "utf-8"),
);
const bpp: BPPDocument = JSON.parse(
  readFileSync(new URL("../fixtures/bpp.json", import.meta.url), "utf-8"),
);
const ranking = JSON.parse(
  readFileSync(new URL("../fixtures/ranking.json", import.meta.url), "utf-8"),
) as Record<string, { weights: UtilityWeights; expected_order: number[] }>;

describe("informativeness recount", () => {
  it("equals the service's value at the default thresholds for every fixture fraction", () => {
    for (const entry of bpp.results) {
      expect(informativeness(entry.bpp_values)).toBeCloseTo(entry.informativeness, 12);
    }
  });

  it("counts boundary values as uninformative (strict inequalities)", () => {
    expect(informativeness([0.95, 0.05, 0.5])).toBe(0);
    expect(informativeness([0.951, 0.049, 0.5])).toBeCloseTo(2 / 3, 12);
  });

  it("is 1.0 when the thresholds meet in the middle", () => {
    for (const entry of bpp.results) {
      // 0.5/0.5 thresholds: every value except exactly 0.5 is extreme
      const info = informativeness(entry.bpp_values, 0.5, 0.5);
      const atHalf = entry.bpp_values.filter((v) => v === 0.5).length;
      expect(info).toBeCloseTo(1 - atHalf / entry.bpp_values.length, 12);
    }
  });

  it("handles single-value datasets", () => {
    expect(informativeness([0.99])).toBe(1);
    expect(informativeness([0.4])).toBe(0);
  });
});

describe("utility ranking parity with the engine", () => {
  for (const [name, testCase] of Object.entries(ranking)) {
    it(`matches rank_designs for the ${name} weights`, () => {
      const ranked = rankEntries(sweep.results, testCase.weights);
      const order = ranked.map((e) => e.interim_fraction ?? 1.0);
      expect(order).toEqual(testCase.expected_order);
    });
  }

  it("ties keep input order under all-zero weights on a fraction-ordered grid", () => {
    const zero: UtilityWeights = {
      assurance: 0,
      duration: 0,
      sample_size: 0,
      futility_incorrect: 0,
    };
    // identical entries are exact ties everywhere, so input order survives
    const twin = [sweep.results[3], sweep.results[3]];
    const ranked = rankEntries(twin, zero);
    expect(ranked[0]).toBe(twin[0]);
    expect(ranked[1]).toBe(twin[1]);
  });
});

describe("config hashing", () => {
  it("is key-order independent", () => {
    expect(stableStringify({ a: 1, b: [2, 3] })).toBe(stableStringify({ b: [2, 3], a: 1 }));
    expect(configHash({ a: 1, b: 2 })).toBe(configHash({ b: 2, a: 1 }));
  });

  it("changes when any value changes", () => {
    expect(configHash({ a: 1 })).not.toBe(configHash({ a: 2 }));
  });
});
