// BPP view: histogram grid by information fraction with informativeness
// annotations; the threshold slider re-counts informativeness
// client-side from the returned BPP values.

import { bppHistogram } from "../charts.js";
import { informativeness } from "../stats.js";
import type { BPPDocument } from "../types.js";

export function renderBPPView(
  doc: BPPDocument | null,
  upper = 0.95,
  lower = 0.05,
  stale = false,
): string {
  if (!doc || doc.results.length === 0) {
    return `<section id="bpp-view" class="panel"><h2>Predictive probability</h2>
      <p class="placeholder">no results yet — run a predictive-probability job</p></section>`;
  }
  const grid = doc.results
    .map((entry) => bppHistogram(entry, informativeness(entry.bpp_values, upper, lower), upper, lower))
    .join("");
  const annotations = doc.results
    .map(
      (entry) =>
        `<li>fraction ${entry.fraction}: informativeness ` +
        `<span class="info-value" data-fraction="${entry.fraction}">` +
        `${informativeness(entry.bpp_values, upper, lower).toFixed(3)}</span>` +
        ` (served: ${entry.informativeness.toFixed(3)} at 0.95/0.05)</li>`,
    )
    .join("");
  return `
<section id="bpp-view" class="panel">
  <h2>Predictive probability by interim timing</h2>
  ${stale ? `<p class="stale-warning">results are stale: the form changed since this run</p>` : ""}
  <label class="slider">upper threshold <input id="bpp-upper" type="range" min="0.5" max="1" step="0.01" value="${upper}"/> ${upper.toFixed(2)}</label>
  <label class="slider">lower threshold <input id="bpp-lower" type="range" min="0" max="0.5" step="0.01" value="${lower}"/> ${lower.toFixed(2)}</label>
  <div class="histogram-grid">${grid}</div>
  <ul class="informativeness-list">${annotations}</ul>
</section>`;
}
