// Operating-characteristics view: stacked decision categories across
// interim fractions plus assurance/duration curves, with a coupled-seed
// sensitivity toggle that swaps in the no-delay rerun.

import { curvesChart, stackedCategoryChart } from "../charts.js";
import type { SweepDocument } from "../types.js";

export function renderOCView(
  doc: SweepDocument | null,
  options: { sensitivity: boolean; stale: boolean } = { sensitivity: false, stale: false },
): string {
  if (!doc || doc.results.length === 0) {
    return `<section id="oc-view" class="panel"><h2>Operating characteristics</h2>
      <p class="placeholder">no results yet — run a sweep</p></section>`;
  }
  const categories = stackedCategoryChart(doc.tables.category_proportions_by_fraction);
  const curves = curvesChart(doc.tables.curves_by_fraction);
  const staleBanner = options.stale
    ? `<p class="stale-warning">results are stale: the form changed since this run</p>`
    : "";
  const rows = doc.tables.curves_by_fraction
    .map(
      (r) =>
        `<tr><td>${r.fraction}</td><td>${r.assurance.toFixed(3)}</td>` +
        `<td>${r.expected_duration_months.toFixed(2)}</td>` +
        `<td>${r.expected_sample_size.toFixed(1)}</td></tr>`,
    )
    .join("");
  return `
<section id="oc-view" class="panel">
  <h2>Operating characteristics ${options.sensitivity ? "(sensitivity: no delay)" : ""}</h2>
  ${staleBanner}
  <label class="toggle"><input id="sensitivity-toggle" type="checkbox" ${options.sensitivity ? "checked" : ""}/>
    rerun with the delayed-effect component removed (coupled seeds)</label>
  <div class="charts">${categories}${curves}</div>
  <table class="oc-table">
    <thead><tr><th>fraction</th><th>assurance</th><th>duration (mo)</th><th>E[N]</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>
</section>`;
}
