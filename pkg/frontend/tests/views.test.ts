// All four views must render from the recorded fixtures with no backend.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { renderBPPView } from "../src/views/bpp_view.js";
import { renderCompareTray } from "../src/views/compare_tray.js";
import { renderOCView } from "../src/views/oc_view.js";
import { parseQuantiles, renderPriorPanel } from "../src/views/prior_panel.js";
import { DEFAULT_PRIORS } from "../src/session.js";
import { informativeness } from "../src/stats.js";
import type { BPPDocument, PriorDensityResponse, SweepDocument } from "../src/types.js";

const load = (name: string) =>
  JSON.parse(readFileSync(new URL(`../fixtures/${name}.json`, import.meta.url), "utf-8"));

const sweep: SweepDocument = load("sweep");
const sweepNoDelay: SweepDocument = load("sweep_no_delay");
const bpp: BPPDocument = load("bpp");
const density: PriorDensityResponse = load("prior_density");

describe("prior panel", () => {
  it("renders density previews from the fixture", () => {
    const html = renderPriorPanel(DEFAULT_PRIORS, density);
    expect(html).toContain("post-delay hazard ratio");
    expect(html).toContain("point-mass");
    expect((html.match(/<svg/g) ?? []).length).toBe(2);
  });

  it("greys out downstream panels when separation is impossible", () => {
    const html = renderPriorPanel({ ...DEFAULT_PRIORS, p_separate: 0 }, density);
    expect(html).toContain('class="downstream disabled"');
    expect(html).toContain("disabled");
  });

  it("shows inline validation for infeasible quantiles", () => {
    expect(parseQuantiles("0.25:0.7, 0.5:0.6").error).toMatch(/increasing/);
    expect(parseQuantiles("0.25:0.55, 0.5:0.6, 0.75:0.7").rows).toHaveLength(3);
    const html = renderPriorPanel(DEFAULT_PRIORS, density, "quantiles must be strictly increasing");
    expect(html).toContain("validation-error");
  });
});

describe("oc view", () => {
  it("renders ten fraction columns from the sweep fixture", () => {
    const html = renderOCView(sweep, { sensitivity: false, stale: false });
    const rows = html.match(/<tbody>([\s\S]*?)<\/tbody>/)![1].match(/<tr>/g)!;
    expect(rows.length).toBe(10); // nine interim timings plus the no-interim baseline
    expect(html).toContain("cat-futility_incorrect");
    expect(html).toContain("assurance-line");
  });

  it("swaps to the sensitivity dataset when toggled", () => {
    const html = renderOCView(sweepNoDelay, { sensitivity: true, stale: false });
    expect(html).toContain("sensitivity: no delay");
    expect(html).toContain("checked");
  });

  it("renders a placeholder with no results", () => {
    const html = renderOCView(null);
    expect(html).toContain("placeholder");
  });

  it("flags stale results", () => {
    const html = renderOCView(sweep, { sensitivity: false, stale: true });
    expect(html).toContain("stale-warning");
  });
});

describe("bpp view", () => {
  it("renders the histogram grid with fixture informativeness annotations", () => {
    const html = renderBPPView(bpp);
    for (const entry of bpp.results) {
      expect(html).toContain(`fraction ${entry.fraction}`);
      expect(html).toContain(entry.informativeness.toFixed(3));
    }
    expect((html.match(/<svg/g) ?? []).length).toBe(bpp.results.length);
  });

  it("recomputes informativeness at slider thresholds", () => {
    const html = renderBPPView(bpp, 0.5, 0.5);
    const first = bpp.results[0];
    const expected = informativeness(first.bpp_values, 0.5, 0.5);
    expect(html).toContain(
      `data-fraction="${first.fraction}">${expected.toFixed(3)}</span>`,
    );
  });

  it("renders a single-value dataset as one bar", () => {
    const doc: BPPDocument = {
      ...bpp,
      results: [{ ...bpp.results[0], bpp_values: [0.97], informativeness: 1.0 }],
    };
    const html = renderBPPView(doc);
    expect(html).toContain("informativeness 1.000");
  });

  it("renders a placeholder with no results", () => {
    expect(renderBPPView(null)).toContain("placeholder");
  });
});

describe("compare tray", () => {
  const pinned = sweep.results.slice(0, 3).map((entry) => ({
    label: entry.interim_fraction === null ? "no interim" : `interim @ ${entry.interim_fraction}`,
    entry,
  }));

  it("ranks pinned designs and marks the winner", () => {
    const html = renderCompareTray(pinned, {
      assurance: 1,
      duration: 0,
      sample_size: 0,
      futility_incorrect: 0,
    });
    expect(html).toContain('class="best"');
    expect(html).toContain("Δ utility");
  });

  it("identical pinned configs tie in input order", () => {
    const twins = [pinned[0], { ...pinned[0], label: "copy" }];
    const html = renderCompareTray(twins, {
      assurance: 1,
      duration: 0,
      sample_size: 0,
      futility_incorrect: 0,
    });
    const firstRow = html.match(/<tr class="best"><td>1<\/td><td>([^<]*)<\/td>/);
    expect(firstRow?.[1]).toBe(pinned[0].label);
  });

  it("renders a placeholder when nothing is pinned", () => {
    expect(renderCompareTray([], { assurance: 1, duration: 0, sample_size: 0, futility_incorrect: 0 }))
      .toContain("placeholder");
  });
});
