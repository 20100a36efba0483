// Compare tray: pin candidate designs, rank them by a user-weighted
// utility (mirroring the engine's ranking), and show deltas against the
// top choice.  This is the decision loop the explorer exists for.

import { utilityOf } from "../stats.js";
import type { SweepEntry, UtilityWeights } from "../types.js";

export interface PinnedDesign {
  label: string;
  entry: SweepEntry;
}

export function renderCompareTray(
  pinned: PinnedDesign[],
  weights: UtilityWeights,
): string {
  if (pinned.length === 0) {
    return `<section id="compare-tray" class="panel"><h2>Compare designs</h2>
      <p class="placeholder">pin designs from the operating-characteristics table to compare</p></section>`;
  }
  // same ordering as the engine: utility desc, first-look fraction asc,
  // expected sample size asc, then pin order
  const ranked = pinned
    .map((pin, index) => ({
      pin,
      key: [
        -utilityOf(pin.entry, weights),
        pin.entry.boundaries.fractions[0],
        pin.entry.summary.expected_sample_size,
        index,
      ] as [number, number, number, number],
    }))
    .sort((a, b) => {
      for (let i = 0; i < 4; i++) {
        if (a.key[i] !== b.key[i]) return a.key[i] < b.key[i] ? -1 : 1;
      }
      return 0;
    })
    .map((k) => k.pin);
  const bestUtility = utilityOf(ranked[0].entry, weights);
  const rows = ranked
    .map(({ label, entry }, i) => {
      const s = entry.summary;
      const delta = utilityOf(entry, weights) - bestUtility;
      return (
        `<tr class="${i === 0 ? "best" : ""}"><td>${i + 1}</td>` +
        `<td>${label}</td>` +
        `<td>${s.assurance.toFixed(3)}</td>` +
        `<td>${s.expected_duration_months.toFixed(2)}</td>` +
        `<td>${s.expected_sample_size.toFixed(1)}</td>` +
        `<td>${(s.category_proportions["futility_incorrect"] ?? 0).toFixed(3)}</td>` +
        `<td>${delta === 0 ? "—" : delta.toFixed(4)}</td></tr>`
      );
    })
    .join("");
  const sliders = (Object.keys(weights) as (keyof UtilityWeights)[])
    .map(
      (key) =>
        `<label class="slider">${key} weight ` +
        `<input class="weight" data-weight="${key}" type="number" step="0.01" value="${weights[key]}"/></label>`,
    )
    .join("");
  return `
<section id="compare-tray" class="panel">
  <h2>Compare designs</h2>
  <div class="weights">${sliders}</div>
  <table class="compare-table">
    <thead><tr><th>rank</th><th>design</th><th>assurance</th><th>duration</th><th>E[N]</th><th>P(incorrect futility)</th><th>Δ utility</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>
</section>`;
}
