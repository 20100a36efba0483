// Shapes of the service's canonical result documents and job records.

export interface JobStatus {
  job_id: string;
  kind: string;
  status: "queued" | "running" | "done" | "failed";
  progress: number;
  error?: string;
}

export interface BoundaryPayload {
  fractions: number[];
  efficacy_z: number[];
  futility_z: (number | "-inf")[];
  alternative_drift: number;
  cumulative_alpha: number[];
  cumulative_beta: number[];
}

export interface OCSummaryPayload {
  assurance: number;
  expected_duration_months: number;
  expected_sample_size: number;
  category_proportions: Record<string, number>;
  mc_standard_errors: Record<string, number>;
  n_sims: number;
}

export interface SweepEntry {
  interim_fraction: number | null;
  boundaries: BoundaryPayload;
  summary: OCSummaryPayload;
}

export interface SweepDocument {
  schema: string;
  kind: "sweep";
  master_seed: number;
  config: Record<string, unknown>;
  results: SweepEntry[];
  tables: {
    category_proportions_by_fraction: Array<Record<string, number>>;
    curves_by_fraction: Array<{
      fraction: number;
      assurance: number;
      expected_duration_months: number;
      expected_sample_size: number;
    }>;
  };
}

export interface BPPEntry {
  fraction: number;
  final_critical_z: number;
  bpp_values: number[];
  informativeness: number;
  mean_bpp: number;
  mc_se_mean_bpp: number;
  histogram: { bin_edges: number[]; counts: number[] };
}

export interface BPPDocument {
  schema: string;
  kind: "bpp";
  master_seed: number;
  config: Record<string, unknown>;
  results: BPPEntry[];
}

export interface DensityCurve {
  kind: "continuous" | "point";
  x?: number[];
  pdf?: number[];
  value?: number;
}

export interface PriorDensityResponse {
  hazard_ratio: { point_mass: { value: number; probability: number }; density: DensityCurve };
  delay_months: { point_mass: { value: number; probability: number }; density: DensityCurve };
  control_survival?: { t_months: number[]; survival: number[] };
}

export interface PriorFormState {
  p_separate: number;
  p_dte: number;
  hr_shape: number;
  hr_rate: number;
  delay_shape: number;
  delay_rate: number;
  control_rate_per_month: number;
  control_shape: number;
}

export interface DesignFormState {
  n_control: number;
  n_experimental: number;
  total_events: number;
  recruitment_duration_months: number;
  interim_fractions: number[];
  n_sims: number;
  master_seed: number;
}

export interface UtilityWeights {
  assurance: number;
  duration: number;
  sample_size: number;
  futility_incorrect: number;
}

// The six decision categories in stacking order.
export const CATEGORY_ORDER = [
  "final_failure",
  "futility_correct",
  "futility_incorrect",
  "efficacy_incorrect",
  "efficacy_correct",
  "final_success",
] as const;

export const CATEGORY_COLORS: Record<string, string> = {
  final_failure: "#888888",
  futility_correct: "#4477aa",
  futility_incorrect: "#ee6677",
  efficacy_incorrect: "#ccbb44",
  efficacy_correct: "#228833",
  final_success: "#66ccee",
};
