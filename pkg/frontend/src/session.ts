// Explorer session: form state, job handles, and results cached by the
// hash of the config that produced them.  A view must only display a
// result whose hash matches the current form state; anything else is
// flagged stale.

import { configHash } from "./stats.js";
import type { DesignFormState, PriorFormState } from "./types.js";

export interface CachedResult<T = unknown> {
  hash: string;
  document: T;
}

export const DEFAULT_PRIORS: PriorFormState = {
  p_separate: 0.9,
  p_dte: 0.7,
  hr_shape: 29.6,
  hr_rate: 47.8,
  delay_shape: 7.29,
  delay_rate: 1.76,
  control_rate_per_month: 0.08,
  control_shape: 1.0,
};

export const DEFAULT_DESIGN: DesignFormState = {
  n_control: 300,
  n_experimental: 300,
  total_events: 450,
  recruitment_duration_months: 12,
  interim_fractions: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
  n_sims: 4000,
  master_seed: 20260809,
};

export class ExplorerSession {
  priors: PriorFormState = { ...DEFAULT_PRIORS };
  design: DesignFormState = { ...DEFAULT_DESIGN };
  sensitivityNoDelay = false;
  private cache = new Map<string, CachedResult>();
  activeJobs = new Map<string, string>(); // view -> job id

  /** Service config for the current form state (sweep/bpp payload). */
  buildConfig(overrides: { p_dte?: number } = {}): Record<string, unknown> {
    const p = this.priors;
    const d = this.design;
    return {
      priors: {
        p_separate: p.p_separate,
        p_dte: overrides.p_dte ?? p.p_dte,
        hazard_ratio: { family: "gamma", shape: p.hr_shape, rate: p.hr_rate },
        delay_months: { family: "gamma", shape: p.delay_shape, rate: p.delay_rate },
        control: { rate_per_month: p.control_rate_per_month, shape: p.control_shape },
      },
      design: {
        n_control: d.n_control,
        n_experimental: d.n_experimental,
        total_events: d.total_events,
        recruitment_duration_months: d.recruitment_duration_months,
        information_fractions: [0.5, 1.0],
      },
      spending: {
        total_alpha_one_sided: 0.025,
        total_beta: 0.1,
        alpha_rule: "direct",
        beta_rule: "direct",
        interim_cumulative_alpha: 0.0125,
        interim_cumulative_beta: 0.05,
        binding_futility: false,
      },
      run: { n_sims: d.n_sims, master_seed: d.master_seed },
      sweep: { interim_fractions: d.interim_fractions },
      bpp: { information_fractions: [0.2, 0.4, 0.6, 0.8], n_trials: 80, n_projections: 150 },
    };
  }

  currentHash(overrides: { p_dte?: number } = {}): string {
    return configHash(this.buildConfig(overrides));
  }

  store<T>(hash: string, document: T): void {
    this.cache.set(hash, { hash, document });
  }

  /** Result for the hash, or undefined when absent. */
  lookup<T>(hash: string): CachedResult<T> | undefined {
    return this.cache.get(hash) as CachedResult<T> | undefined;
  }

  /** True when a displayed result no longer matches the form state. */
  isStale(displayedHash: string, overrides: { p_dte?: number } = {}): boolean {
    return displayedHash !== this.currentHash(overrides);
  }
}
