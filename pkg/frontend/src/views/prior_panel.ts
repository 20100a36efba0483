// Prior panel: elicited-parameter form with a live density preview.

import { densityChart } from "../charts.js";
import type { PriorDensityResponse, PriorFormState } from "../types.js";

export interface QuantileRow {
  p: number;
  value: number;
}

/** Parse "0.25:0.55, 0.5:0.6, 0.75:0.7" into quantile pairs; returns an
 * error message when the pairs are not strictly increasing in both
 * coordinates (the same feasibility rule the service enforces). */
export function parseQuantiles(text: string): { rows?: QuantileRow[]; error?: string } {
  const rows: QuantileRow[] = [];
  for (const part of text.split(",")) {
    if (!part.trim()) continue;
    const [p, v] = part.split(":").map((s) => Number(s.trim()));
    if (!isFinite(p) || !isFinite(v)) return { error: `cannot parse "${part.trim()}"` };
    rows.push({ p, value: v });
  }
  if (rows.length < 2) return { error: "need at least two probability:value pairs" };
  const sorted = [...rows].sort((a, b) => a.p - b.p);
  for (let i = 1; i < sorted.length; i++) {
    if (sorted[i].p <= sorted[i - 1].p || sorted[i].value <= sorted[i - 1].value) {
      return { error: "quantiles must be strictly increasing in both coordinates" };
    }
  }
  return { rows: sorted };
}

function numberField(id: string, label: string, value: number, step = "any"): string {
  return (
    `<label class="field" for="${id}">${label}` +
    `<input id="${id}" type="number" step="${step}" value="${value}"/></label>`
  );
}

export function renderPriorPanel(
  state: PriorFormState,
  density: PriorDensityResponse | null,
  quantileError: string | null = null,
): string {
  const downstreamDisabled = state.p_separate === 0;
  const downstreamClass = downstreamDisabled ? "downstream disabled" : "downstream";
  const previews = density
    ? densityChart(
        density.hazard_ratio.density,
        density.hazard_ratio.point_mass,
        "post-delay hazard ratio",
      ) +
      densityChart(
        density.delay_months.density,
        density.delay_months.point_mass,
        "delay (months)",
      )
    : `<p class="placeholder">density preview unavailable</p>`;
  return `
<section id="prior-panel" class="panel">
  <h2>Elicited priors</h2>
  ${numberField("p-separate", "P(curves separate)", state.p_separate, "0.01")}
  ${numberField("p-dte", "P(delayed effect | separate)", state.p_dte, "0.01")}
  <fieldset class="${downstreamClass}" ${downstreamDisabled ? "disabled" : ""}>
    <legend>given separation</legend>
    ${numberField("hr-shape", "hazard ratio Gamma shape", state.hr_shape)}
    ${numberField("hr-rate", "hazard ratio Gamma rate", state.hr_rate)}
    <label class="field" for="hr-quantiles">or hazard-ratio quantiles
      <input id="hr-quantiles" type="text" placeholder="0.25:0.55, 0.5:0.6, 0.75:0.7"/>
    </label>
    ${numberField("delay-shape", "delay Gamma shape", state.delay_shape)}
    ${numberField("delay-rate", "delay Gamma rate", state.delay_rate)}
  </fieldset>
  ${numberField("control-rate", "control event rate (/month)", state.control_rate_per_month)}
  ${numberField("control-shape", "control Weibull shape", state.control_shape)}
  ${quantileError ? `<p class="validation-error">${quantileError}</p>` : ""}
  <div class="density-previews">${previews}</div>
</section>`;
}
