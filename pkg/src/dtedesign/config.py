"""Run configuration: parsing, validation and design assembly.

Configs are YAML (or the same structure as JSON over HTTP).  Field names
carry explicit units.  Validation errors name the offending field.
"""

from dataclasses import dataclass, field

import yaml

from .boundaries import SpendingSpec, compute_boundaries, drift_for_alternative
from .priors import Distribution, PriorSpec, fit_from_quantiles
from .trial import TrialDesign

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "build_design"]


class ConfigError(ValueError):
    """Invalid configuration; ``field`` is the dotted path of the culprit."""

    def __init__(self, field_path: str, message: str):
        self.field = field_path
        super().__init__(f"{field_path}: {message}")


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ConfigError(f"{path}.{key}", "missing required field")
    return mapping[key]


def _number(value, path: str, positive=False, nonnegative=False, unit_interval=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    v = float(value)
    if positive and v <= 0:
        raise ConfigError(path, f"must be positive, got {v}")
    if nonnegative and v < 0:
        raise ConfigError(path, f"must be nonnegative, got {v}")
    if unit_interval and not 0.0 <= v <= 1.0:
        raise ConfigError(path, f"must lie in [0, 1], got {v}")
    return v


def _integer(value, path: str, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    return value


def _distribution(node, path: str) -> Distribution:
    """Parse a distribution node: plain number = point mass."""
    if isinstance(node, (int, float)) and not isinstance(node, bool):
        return Distribution("point", (float(node),))
    if not isinstance(node, dict):
        raise ConfigError(path, "expected a number or a {family: ...} mapping")
    family = _require(node, "family", path)
    try:
        if "quantiles" in node:
            pairs = node["quantiles"]
            return fit_from_quantiles(family, pairs)
        if family == "gamma":
            return Distribution(
                "gamma",
                (_number(_require(node, "shape", path), f"{path}.shape", positive=True),
                 _number(_require(node, "rate", path), f"{path}.rate", positive=True)),
            )
        if family == "lognormal":
            return Distribution(
                "lognormal",
                (_number(_require(node, "mu", path), f"{path}.mu"),
                 _number(_require(node, "sigma", path), f"{path}.sigma", positive=True)),
            )
        if family == "beta_scaled":
            return Distribution(
                "beta_scaled",
                (_number(_require(node, "a", path), f"{path}.a", positive=True),
                 _number(_require(node, "b", path), f"{path}.b", positive=True),
                 _number(_require(node, "scale", path), f"{path}.scale", positive=True)),
            )
        if family == "point":
            return Distribution("point", (_number(_require(node, "value", path), f"{path}.value"),))
    except ConfigError:
        raise
    except (ValueError, RuntimeError) as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(f"{path}.family", f"unknown family {family!r}")


@dataclass
class RunConfig:
    """Validated run configuration."""

    priors: PriorSpec
    n_control: int
    n_experimental: int
    total_events: int
    recruitment_months: float
    information_fractions: tuple
    total_alpha: float
    total_beta: float
    alpha_rule: str
    beta_rule: str
    interim_cumulative_alpha: float | None
    interim_cumulative_beta: float | None
    direct_cumulative: tuple | None
    binding_futility: bool
    design_hazard_ratio: float | None
    n_sims: int
    master_seed: int
    workers: int
    sweep_fractions: tuple
    bpp_fractions: tuple
    bpp_n_trials: int
    bpp_n_projections: int
    echo: dict = field(default_factory=dict)


def parse_config(raw: dict) -> RunConfig:
    """Validate a configuration mapping and normalise defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("", "configuration must be a mapping")

    pr = _require(raw, "priors", "")
    if not isinstance(pr, dict):
        raise ConfigError("priors", "expected a mapping")
    p_sep = _number(_require(pr, "p_separate", "priors"), "priors.p_separate", unit_interval=True)
    p_dte = _number(_require(pr, "p_dte", "priors"), "priors.p_dte", unit_interval=True)
    hr_dist = _distribution(_require(pr, "hazard_ratio", "priors"), "priors.hazard_ratio")
    delay_dist = _distribution(_require(pr, "delay_months", "priors"), "priors.delay_months")
    ctrl = _require(pr, "control", "priors")
    if not isinstance(ctrl, dict):
        raise ConfigError("priors.control", "expected a mapping")
    lam = _distribution(_require(ctrl, "rate_per_month", "priors.control"), "priors.control.rate_per_month")
    gam = _distribution(_require(ctrl, "shape", "priors.control"), "priors.control.shape")
    if lam.is_point and lam.params[0] <= 0:
        raise ConfigError("priors.control.rate_per_month", "must be positive")
    if gam.is_point and gam.params[0] <= 0:
        raise ConfigError("priors.control.shape", "must be positive")
    try:
        priors = PriorSpec.build(p_sep, p_dte, hr_dist, delay_dist, lam, gam)
    except ValueError as exc:
        raise ConfigError("priors", str(exc)) from exc

    ds = _require(raw, "design", "")
    n_control = _integer(_require(ds, "n_control", "design"), "design.n_control", minimum=1)
    n_experimental = _integer(
        _require(ds, "n_experimental", "design"), "design.n_experimental", minimum=1
    )
    total_events = _integer(_require(ds, "total_events", "design"), "design.total_events", minimum=1)
    if total_events > n_control + n_experimental:
        raise ConfigError("design.total_events", "cannot exceed the number of patients")
    recruitment = _number(
        _require(ds, "recruitment_duration_months", "design"),
        "design.recruitment_duration_months",
        positive=True,
    )
    fractions = ds.get("information_fractions", [1.0])
    if not isinstance(fractions, list) or not fractions:
        raise ConfigError("design.information_fractions", "expected a nonempty list")
    fractions = tuple(
        _number(f, f"design.information_fractions[{i}]", positive=True)
        for i, f in enumerate(fractions)
    )
    if any(f2 <= f1 for f1, f2 in zip(fractions, fractions[1:])) or fractions[-1] != 1.0:
        raise ConfigError(
            "design.information_fractions", "must be strictly increasing and end at 1.0"
        )

    sp = raw.get("spending", {})
    total_alpha = _number(sp.get("total_alpha_one_sided", 0.025), "spending.total_alpha_one_sided", positive=True)
    total_beta = _number(sp.get("total_beta", 0.10), "spending.total_beta", nonnegative=True)
    alpha_rule = sp.get("alpha_rule", "obf_type")
    beta_rule = sp.get("beta_rule", alpha_rule)
    ia = sp.get("interim_cumulative_alpha")
    ib = sp.get("interim_cumulative_beta")
    if ia is not None:
        ia = _number(ia, "spending.interim_cumulative_alpha", nonnegative=True)
    if ib is not None:
        ib = _number(ib, "spending.interim_cumulative_beta", nonnegative=True)
    direct = sp.get("direct_cumulative")
    if direct is not None:
        direct = tuple(tuple(float(x) for x in row) for row in direct)
    binding = bool(sp.get("binding_futility", True))
    hr_design = sp.get("design_hazard_ratio")
    if hr_design is not None:
        hr_design = _number(hr_design, "spending.design_hazard_ratio", positive=True)

    run = raw.get("run", {})
    n_sims = _integer(run.get("n_sims", 10000), "run.n_sims", minimum=1)
    master_seed = _integer(run.get("master_seed", 1), "run.master_seed")
    workers = _integer(run.get("workers", 1), "run.workers", minimum=1)

    sweep = raw.get("sweep", {})
    sweep_fractions = tuple(
        _number(f, f"sweep.interim_fractions[{i}]", positive=True)
        for i, f in enumerate(sweep.get("interim_fractions", []))
    )
    if any(not f < 1.0 for f in sweep_fractions):
        raise ConfigError("sweep.interim_fractions", "interim fractions must lie in (0, 1)")

    bpp = raw.get("bpp", {})
    if "information_fractions" in bpp:
        bpp_fractions = tuple(
            _number(f, f"bpp.information_fractions[{i}]", positive=True)
            for i, f in enumerate(bpp["information_fractions"])
        )
    elif "information_fraction" in bpp:
        bpp_fractions = (_number(bpp["information_fraction"], "bpp.information_fraction", positive=True),)
    else:
        bpp_fractions = ()
    bpp_n_trials = _integer(bpp.get("n_trials", 500), "bpp.n_trials", minimum=1)
    bpp_n_projections = _integer(bpp.get("n_projections", 500), "bpp.n_projections", minimum=1)

    echo = _echo_dict(raw)
    return RunConfig(
        priors=priors,
        n_control=n_control,
        n_experimental=n_experimental,
        total_events=total_events,
        recruitment_months=recruitment,
        information_fractions=fractions,
        total_alpha=total_alpha,
        total_beta=total_beta,
        alpha_rule=alpha_rule,
        beta_rule=beta_rule,
        interim_cumulative_alpha=ia,
        interim_cumulative_beta=ib,
        direct_cumulative=direct,
        binding_futility=binding,
        design_hazard_ratio=hr_design,
        n_sims=n_sims,
        master_seed=master_seed,
        workers=workers,
        sweep_fractions=sweep_fractions,
        bpp_fractions=bpp_fractions,
        bpp_n_trials=bpp_n_trials,
        bpp_n_projections=bpp_n_projections,
        echo=echo,
    )


def _echo_dict(raw: dict) -> dict:
    """Config echo for result documents; execution-only knobs are dropped
    so reruns with different worker counts stay byte-identical."""
    echo = {k: v for k, v in raw.items() if k != "outputs"}
    if "run" in echo and isinstance(echo["run"], dict):
        echo["run"] = {k: v for k, v in echo["run"].items() if k != "workers"}
    return echo


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError("", f"invalid YAML: {exc}") from exc
    return parse_config(raw)


def spending_spec_for(cfg: RunConfig, fractions) -> SpendingSpec:
    """SpendingSpec for a concrete look schedule.

    With the direct rule and per-interim cumulative values configured, a
    cumulative table is synthesised for the given schedule (the same
    interim allocation at whatever fraction the look lands on).
    """
    direct = cfg.direct_cumulative
    if "direct" in (cfg.alpha_rule, cfg.beta_rule) and direct is None:
        if cfg.interim_cumulative_alpha is None or cfg.interim_cumulative_beta is None:
            raise ConfigError(
                "spending",
                "direct rule needs direct_cumulative or interim_cumulative_alpha/beta",
            )
        direct = tuple(
            (f, cfg.interim_cumulative_alpha, cfg.interim_cumulative_beta)
            for f in fractions[:-1]
        ) + ((1.0, cfg.total_alpha, cfg.total_beta),)
    return SpendingSpec(
        total_alpha=cfg.total_alpha,
        total_beta=cfg.total_beta,
        alpha_rule=cfg.alpha_rule,
        beta_rule=cfg.beta_rule,
        direct_cumulative=direct,
        binding_futility=cfg.binding_futility,
    )


def build_design(cfg: RunConfig, fractions=None) -> TrialDesign:
    """Assemble a TrialDesign (boundaries included) for a look schedule."""
    fractions = tuple(fractions) if fractions is not None else cfg.information_fractions
    spec = spending_spec_for(cfg, fractions)
    drift = None
    if cfg.design_hazard_ratio is not None:
        ratio = cfg.n_experimental / cfg.n_control
        drift = drift_for_alternative(cfg.design_hazard_ratio, cfg.total_events, ratio)
    bounds = compute_boundaries(spec, fractions, drift=drift)
    return TrialDesign(
        n_control=cfg.n_control,
        n_experimental=cfg.n_experimental,
        total_events=cfg.total_events,
        recruitment_months=cfg.recruitment_months,
        boundaries=bounds,
        seed=cfg.master_seed,
    )
