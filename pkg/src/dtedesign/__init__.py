"""Simulation engine and design explorer for group-sequential survival
trials with delayed treatment effects."""

from ._rng import substream
from .boundaries import (
    BoundarySet,
    InfeasibleSpendError,
    SpendingSpec,
    compute_boundaries,
    drift_for_alternative,
    spend,
)
from .bpp import (
    BPPResult,
    InterimDataset,
    LowEffectiveSampleError,
    PosteriorDraws,
    design_stage_bpp,
    futility_rule,
    informativeness,
    log_likelihood,
    make_interim_dataset,
    posterior_sample,
    predictive_probability,
)
from .dte import (
    ControlParams,
    ScenarioDraw,
    hazard_ratio,
    sample_conditional,
    sample_control,
    sample_experimental,
    survival_control,
    survival_experimental,
)
from .oc import (
    DecisionCategory,
    OCSummary,
    UtilityWeights,
    rank_designs,
    run_oc,
    run_sensitivity,
    sweep_designs,
)
from .priors import (
    Distribution,
    MixturePrior,
    PriorSpec,
    fit_from_quantiles,
    prior_density,
    sample_scenario,
)
from .trial import (
    Decision,
    PatientData,
    PatientRecord,
    SequentialOutcome,
    TrialDesign,
    ZeroVarianceError,
    logrank_z,
    recruit,
    simulate_trial,
)

__version__ = "0.1.0"
