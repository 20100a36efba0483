// Client-side statistics: the only computation the explorer performs
// itself is re-counting informativeness when the threshold slider moves
// and ranking pinned designs by a utility; everything else is server-side.

import type { SweepEntry, UtilityWeights } from "./types.js";

/** Proportion of BPP values strictly outside (lower, upper). */
export function informativeness(
  values: number[],
  upper = 0.95,
  lower = 0.05,
): number {
  if (values.length === 0) return 0;
  let extreme = 0;
  for (const v of values) {
    if (v > upper || v < lower) extreme += 1;
  }
  return extreme / values.length;
}

export function utilityOf(entry: SweepEntry, w: UtilityWeights): number {
  const s = entry.summary;
  return (
    w.assurance * s.assurance -
    w.duration * s.expected_duration_months -
    w.sample_size * s.expected_sample_size -
    w.futility_incorrect * (s.category_proportions["futility_incorrect"] ?? 0)
  );
}

/**
 * Rank sweep entries by descending linear utility.  Ties break by earlier
 * first-look fraction, then lower expected sample size, then input order
 * (mirrors the engine's ranking exactly).
 */
export function rankEntries(entries: SweepEntry[], w: UtilityWeights): SweepEntry[] {
  const keyed = entries.map((entry, index) => ({
    entry,
    key: [
      -utilityOf(entry, w),
      entry.boundaries.fractions[0],
      entry.summary.expected_sample_size,
      index,
    ] as [number, number, number, number],
  }));
  keyed.sort((a, b) => {
    for (let i = 0; i < 4; i++) {
      if (a.key[i] !== b.key[i]) return a.key[i] < b.key[i] ? -1 : 1;
    }
    return 0;
  });
  return keyed.map((k) => k.entry);
}

/** Stable stringify (sorted keys) so identical configs hash identically. */
export function stableStringify(value: unknown): string {
  if (value === null || typeof value !== "object") return JSON.stringify(value);
  if (Array.isArray(value)) {
    return "[" + value.map(stableStringify).join(",") + "]";
  }
  const obj = value as Record<string, unknown>;
  const keys = Object.keys(obj).sort();
  return "{" + keys.map((k) => JSON.stringify(k) + ":" + stableStringify(obj[k])).join(",") + "}";
}

/** FNV-1a hash of the stable serialisation; keys cached results. */
export function configHash(config: unknown): string {
  const text = stableStringify(config);
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash.toString(16).padStart(8, "0");
}
