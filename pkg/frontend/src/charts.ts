// Chart rendering as pure SVG strings: no DOM needed, trivially testable.

import { CATEGORY_COLORS, CATEGORY_ORDER } from "./types.js";
import type { BPPEntry, DensityCurve } from "./types.js";

const W = 560;
const H = 300;
const PAD = { left: 52, right: 52, top: 24, bottom: 40 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function svgOpen(width = W, height = H, title = ""): string {
  const t = title ? `<title>${esc(title)}</title>` : "";
  return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" role="img">${t}`;
}

function xScale(values: number[], width = W) {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  return (v: number) =>
    PAD.left + ((v - lo) / span) * (width - PAD.left - PAD.right);
}

function yScale(lo: number, hi: number, height = H) {
  const span = hi - lo || 1;
  return (v: number) =>
    height - PAD.bottom - ((v - lo) / span) * (height - PAD.top - PAD.bottom);
}

function axisLabels(xs: number[], y: number): string {
  const sx = xScale(xs);
  return xs
    .map(
      (v) =>
        `<text x="${sx(v).toFixed(1)}" y="${y}" font-size="10" text-anchor="middle">${v}</text>`,
    )
    .join("");
}

/** Stacked proportions of the six decision categories by interim fraction. */
export function stackedCategoryChart(
  rows: Array<Record<string, number>>,
): string {
  const fractions = rows.map((r) => r.fraction);
  const sx = xScale(fractions);
  const sy = yScale(0, 1);
  const barWidth = ((W - PAD.left - PAD.right) / Math.max(rows.length, 1)) * 0.62;
  let body = "";
  for (const row of rows) {
    let cumulative = 0;
    for (const category of CATEGORY_ORDER) {
      const value = row[category] ?? 0;
      const y0 = sy(cumulative);
      const y1 = sy(cumulative + value);
      body += `<rect class="cat-${category}" x="${(sx(row.fraction) - barWidth / 2).toFixed(1)}" y="${y1.toFixed(1)}" width="${barWidth.toFixed(1)}" height="${(y0 - y1).toFixed(1)}" fill="${CATEGORY_COLORS[category]}"><title>${esc(category)} @ ${row.fraction}: ${(value * 100).toFixed(1)}%</title></rect>`;
      cumulative += value;
    }
  }
  const legend = CATEGORY_ORDER.map(
    (category, i) =>
      `<rect x="${PAD.left + i * 85}" y="4" width="9" height="9" fill="${CATEGORY_COLORS[category]}"/>` +
      `<text x="${PAD.left + 12 + i * 85}" y="12" font-size="8">${esc(category)}</text>`,
  ).join("");
  return (
    svgOpen(W, H, "decision categories by interim fraction") +
    legend +
    body +
    axisLabels(fractions, H - PAD.bottom + 14) +
    `<text x="${W / 2}" y="${H - 8}" font-size="11" text-anchor="middle">interim information fraction</text>` +
    "</svg>"
  );
}

/** Assurance (left axis) and expected duration (right axis) curves. */
export function curvesChart(
  rows: Array<{ fraction: number; assurance: number; expected_duration_months: number }>,
): string {
  const fractions = rows.map((r) => r.fraction);
  const sx = xScale(fractions);
  const syA = yScale(0, 1);
  const durations = rows.map((r) => r.expected_duration_months);
  const syD = yScale(Math.min(...durations) - 1, Math.max(...durations) + 1);
  const path = (ys: number[], scale: (v: number) => number) =>
    rows
      .map(
        (r, i) => `${i === 0 ? "M" : "L"}${sx(r.fraction).toFixed(1)},${scale(ys[i]).toFixed(1)}`,
      )
      .join(" ");
  return (
    svgOpen(W, H, "assurance and expected duration") +
    `<path class="assurance-line" d="${path(rows.map((r) => r.assurance), syA)}" fill="none" stroke="#228833" stroke-width="2"/>` +
    `<path class="duration-line" d="${path(durations, syD)}" fill="none" stroke="#4477aa" stroke-width="2" stroke-dasharray="5 3"/>` +
    rows
      .map(
        (r) =>
          `<circle cx="${sx(r.fraction).toFixed(1)}" cy="${syA(r.assurance).toFixed(1)}" r="3" fill="#228833"><title>assurance ${r.assurance.toFixed(3)} @ ${r.fraction}</title></circle>`,
      )
      .join("") +
    axisLabels(fractions, H - PAD.bottom + 14) +
    `<text x="14" y="${H / 2}" font-size="11" transform="rotate(-90 14 ${H / 2})" text-anchor="middle" fill="#228833">assurance</text>` +
    `<text x="${W - 12}" y="${H / 2}" font-size="11" transform="rotate(90 ${W - 12} ${H / 2})" text-anchor="middle" fill="#4477aa">expected duration (months)</text>` +
    "</svg>"
  );
}

/** One BPP histogram with threshold markers. */
export function bppHistogram(
  entry: BPPEntry,
  info: number,
  upper = 0.95,
  lower = 0.05,
  width = 270,
  height = 190,
): string {
  const bins = 20;
  const counts = new Array(bins).fill(0);
  for (const v of entry.bpp_values) {
    counts[Math.min(bins - 1, Math.floor(v * bins))] += 1;
  }
  const peak = Math.max(...counts, 1);
  const plotW = width - 40;
  const plotH = height - 44;
  let bars = "";
  for (let i = 0; i < bins; i++) {
    const h = (counts[i] / peak) * plotH;
    bars += `<rect x="${(20 + (i * plotW) / bins).toFixed(1)}" y="${(height - 28 - h).toFixed(1)}" width="${(plotW / bins - 1).toFixed(1)}" height="${h.toFixed(1)}" fill="#4477aa"/>`;
  }
  const xAt = (v: number) => 20 + v * plotW;
  return (
    svgOpen(width, height, `BPP distribution at fraction ${entry.fraction}`) +
    bars +
    `<line x1="${xAt(lower)}" x2="${xAt(lower)}" y1="${height - 28 - plotH}" y2="${height - 28}" stroke="firebrick" stroke-dasharray="3 2"/>` +
    `<line x1="${xAt(upper)}" x2="${xAt(upper)}" y1="${height - 28 - plotH}" y2="${height - 28}" stroke="firebrick" stroke-dasharray="3 2"/>` +
    `<text x="${width / 2}" y="12" font-size="11" text-anchor="middle">fraction ${entry.fraction} — informativeness ${info.toFixed(3)}</text>` +
    `<text x="${width / 2}" y="${height - 8}" font-size="10" text-anchor="middle">Bayesian predictive probability</text>` +
    "</svg>"
  );
}

/** Continuous density curve with an optional point-mass spike. */
export function densityChart(
  curve: DensityCurve,
  pointMass: { value: number; probability: number },
  label: string,
  width = 270,
  height = 180,
): string {
  if (curve.kind === "point" || !curve.x || !curve.pdf) {
    return (
      svgOpen(width, height, label) +
      `<text x="${width / 2}" y="${height / 2}" font-size="11" text-anchor="middle">point mass at ${curve.value}</text></svg>`
    );
  }
  const xs = curve.x;
  const pdf = curve.pdf;
  const allX = pointMass.probability > 0 ? [...xs, pointMass.value] : xs;
  const lo = Math.min(...allX);
  const hi = Math.max(...allX);
  const peak = Math.max(...pdf);
  const sx = (v: number) => 16 + ((v - lo) / (hi - lo || 1)) * (width - 32);
  const sy = (v: number) => height - 30 - (v / (peak || 1)) * (height - 56);
  const path = xs.map((x, i) => `${i ? "L" : "M"}${sx(x).toFixed(1)},${sy(pdf[i]).toFixed(1)}`).join(" ");
  const spike =
    pointMass.probability > 0
      ? `<line class="point-mass" x1="${sx(pointMass.value)}" x2="${sx(pointMass.value)}" y1="${height - 30}" y2="${sy(peak * pointMass.probability)}" stroke="firebrick" stroke-width="3"><title>mass ${pointMass.probability.toFixed(2)} at ${pointMass.value}</title></line>`
      : "";
  return (
    svgOpen(width, height, label) +
    `<path d="${path}" fill="none" stroke="#4477aa" stroke-width="1.6"/>` +
    spike +
    `<text x="${width / 2}" y="14" font-size="11" text-anchor="middle">${esc(label)}</text>` +
    `<text x="16" y="${height - 8}" font-size="9">${lo.toFixed(2)}</text>` +
    `<text x="${width - 16}" y="${height - 8}" font-size="9" text-anchor="end">${hi.toFixed(2)}</text>` +
    "</svg>"
  );
}
