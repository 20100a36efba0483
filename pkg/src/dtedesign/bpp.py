"""Bayesian predictive probability at an interim data cut.

Given an interim dataset, the posterior over (control parameters, delay,
post-delay hazard ratio) is formed by stratified sampling-importance-
resampling from the joint prior: each mixture component's marginal
likelihood is estimated from prior draws (exactly, for point-mass
components), components are reweighted by Bayes' rule, and draws are
resampled within components.  This handles the point masses exactly and
needs no tuning; a random-walk Metropolis refinement within the
continuous components is available for low-ESS interim datasets.

The predictive probability then projects each posterior draw forward:
censored patients are completed conditionally on their survival so far,
not-yet-recruited patients get fresh survival times, the combined data
are cut at the design's total event count, and the final log-rank test is
compared against the final-look critical value (future interim boundaries
are not applied).  BPP is the fraction of projections that succeed.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._rng import substream
from .dte import ControlParams, ScenarioDraw
from .priors import PriorSpec, sample_scenario_arrays
from .trial import (
    PatientData,
    TrialDesign,
    ZeroVarianceError,
    generate_patients,
    logrank_z,
    snapshot_at_events,
)

__all__ = [
    "InterimDataset",
    "PosteriorDraws",
    "BPPResult",
    "LowEffectiveSampleError",
    "make_interim_dataset",
    "log_likelihood",
    "posterior_sample",
    "predictive_probability",
    "design_stage_bpp",
    "informativeness",
    "futility_rule",
]

_TINY = np.finfo(float).tiny


class LowEffectiveSampleError(RuntimeError):
    """Posterior importance weights collapsed below the configured floor."""

    def __init__(self, ess: float, floor: float, diagnostics: dict):
        self.ess = ess
        self.floor = floor
        self.diagnostics = diagnostics
        super().__init__(
            f"effective sample size {ess:.1f} below floor {floor:.1f}; "
            f"diagnostics: {diagnostics}"
        )

    def __reduce__(self):  # survives pickling across worker processes
        return (type(self), (self.ess, self.floor, self.diagnostics))


@dataclass
class InterimDataset:
    """Snapshot at an interim cut plus the context needed for projection."""

    fraction: float
    events_observed: int
    calendar_time: float
    # analysis set (patients recruited by the cut)
    observed_time: np.ndarray
    event_flag: np.ndarray
    is_experimental: np.ndarray
    # full patient set for projecting the remainder of the trial
    all_is_experimental: np.ndarray
    all_recruit_time: np.ndarray
    included: np.ndarray

    @property
    def n_patients(self) -> int:
        return len(self.all_recruit_time)


def make_interim_dataset(
    data: PatientData, design: TrialDesign, fraction: float
) -> InterimDataset:
    """Cut a latent dataset at ceil(fraction * total_events) pseudo events."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    target = int(np.ceil(fraction * design.total_events))
    snap = snapshot_at_events(data, target)
    return InterimDataset(
        fraction=fraction,
        events_observed=target,
        calendar_time=snap.calendar_time,
        observed_time=snap.observed_time,
        event_flag=snap.event_flag,
        is_experimental=snap.is_experimental,
        all_is_experimental=data.is_experimental.copy(),
        all_recruit_time=data.recruit_time.copy(),
        included=snap.included,
    )


def _loglik_block(data: InterimDataset, lam, gam, T, hr) -> np.ndarray:
    """Censored-data log likelihood for a block of parameter draws."""
    x = data.observed_time[None, :]
    ev = data.event_flag[None, :]
    isexp = data.is_experimental[None, :]
    lam = lam[:, None]
    gam = gam[:, None]
    T = T[:, None]
    hr = hr[:, None]

    safe_x = np.where(x > 0, x, 1.0)  # events at exactly t=0 have measure zero
    cum_haz = (lam * x) ** gam
    log_hc = np.log(gam) + gam * np.log(lam) + (gam - 1.0) * np.log(safe_x)
    base = np.where(ev, log_hc, 0.0) - cum_haz

    post = isexp & (x > T)
    post_minus_base = (
        np.where(ev, np.log(hr), 0.0)
        - (lam * T) ** gam
        - hr * lam**gam * (x**gam - T**gam)
        + cum_haz
    )
    return np.sum(base + np.where(post, post_minus_base, 0.0), axis=1)


def _loglik_draws(data: InterimDataset, lam, gam, T, hr, block: int = 2048) -> np.ndarray:
    lam, gam, T, hr = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (lam, gam, T, hr))
    out = np.empty(len(lam))
    for start in range(0, len(lam), block):
        sl = slice(start, start + block)
        out[sl] = _loglik_block(data, lam[sl], gam[sl], T[sl], hr[sl])
    return out


def log_likelihood(data: InterimDataset, s: ScenarioDraw) -> float:
    """Log likelihood of the interim data under one scenario.

    Control records contribute Weibull event densities and survival for
    censored times; experimental records use the control law up to the
    delay and the hazard-ratio-scaled law beyond it.
    """
    value = float(
        _loglik_draws(
            data,
            np.array([s.control.lambda_c]),
            np.array([s.control.gamma_c]),
            np.array([s.delay_T]),
            np.array([s.post_hr]),
        )[0]
    )
    if math.isnan(value):
        raise ValueError("log likelihood is not finite for these parameters")
    return value


@dataclass
class PosteriorDraws:
    """M resampled posterior draws with diagnostics."""

    lambda_c: np.ndarray
    gamma_c: np.ndarray
    delay_T: np.ndarray
    post_hr: np.ndarray
    weights: np.ndarray  # uniform after resampling
    effective_sample_size: float
    occupancy: dict  # resampled draw counts per mixture component
    component_posterior: dict  # exact-weight posterior over components
    n_prior_draws: int

    def __len__(self) -> int:
        return len(self.post_hr)

    def scenario(self, j: int) -> ScenarioDraw:
        return ScenarioDraw(
            control=ControlParams(float(self.lambda_c[j]), float(self.gamma_c[j])),
            delay_T=float(self.delay_T[j]),
            post_hr=float(self.post_hr[j]),
        )


def _component_definitions(priors: PriorSpec):
    """(name, prior mass, degenerate?) for the active mixture components."""
    control_degenerate = priors.control_lambda.is_point and priors.control_gamma.is_point
    comps = []
    p0 = 1.0 - priors.p_separate
    if p0 > 0:
        comps.append(("no_separation", p0, control_degenerate))
    p1 = priors.p_separate * (1.0 - priors.p_dte)
    if p1 > 0:
        comps.append(
            ("separation_no_delay", p1, control_degenerate and priors.hr_prior.continuous.is_point)
        )
    p2 = priors.p_separate * priors.p_dte
    if p2 > 0:
        comps.append(
            (
                "separation_delay",
                p2,
                control_degenerate
                and priors.hr_prior.continuous.is_point
                and priors.delay_prior.continuous.is_point,
            )
        )
    return comps


def _component_draws(name: str, priors: PriorSpec, k: int, rng):
    lam = priors.control_lambda.sample(k, rng)
    gam = priors.control_gamma.sample(k, rng)
    if name == "no_separation":
        return lam, gam, np.zeros(k), np.ones(k)
    hr = priors.hr_prior.continuous.sample(k, rng)
    if name == "separation_no_delay":
        return lam, gam, np.zeros(k), hr
    return lam, gam, priors.delay_prior.continuous.sample(k, rng), hr


def _logsumexp(v: np.ndarray) -> float:
    m = np.max(v)
    if not np.isfinite(m):
        return float(m)
    return float(m + np.log(np.sum(np.exp(v - m))))


def posterior_sample(
    data: InterimDataset,
    priors: PriorSpec,
    M: int,
    rng: np.random.Generator,
    n_prior_draws: int | None = None,
    ess_floor: float | None = None,
    method: str = "sir",
) -> PosteriorDraws:
    """Sample M draws from the posterior given the interim data.

    Point-mass mixture components receive posterior mass by direct weight
    computation (exact Bayes when the component is fully degenerate), not
    by continuous exploration.  ``method="metropolis"`` refines the
    continuous components with a random-walk chain instead of resampling.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if priors.hr_prior.point_mass_prob not in (0.0,):
        raise NotImplementedError(
            "posterior sampling assumes the hazard-ratio atom is carried by "
            "the separation indicator, not by hr_prior itself"
        )
    if n_prior_draws is None:
        n_prior_draws = max(8 * M, 4000)
    if ess_floor is None:
        ess_floor = M / 20.0

    comps = _component_definitions(priors)
    n_continuous = sum(1 for _, _, degenerate in comps if not degenerate)
    budget = n_prior_draws

    per_comp = {}
    for name, mass, degenerate in comps:
        if degenerate:
            per_comp[name] = 1
        else:
            per_comp[name] = max(200, int(round(budget / max(n_continuous, 1))))

    draws = {}
    log_marginal = {}
    loglik = {}
    for name, mass, degenerate in comps:
        k = per_comp[name]
        lam, gam, T, hr = _component_draws(name, priors, k, rng)
        ll = _loglik_draws(data, lam, gam, T, hr)
        draws[name] = (lam, gam, T, hr)
        loglik[name] = ll
        log_marginal[name] = _logsumexp(ll) - np.log(k)

    # posterior over components by Bayes' rule on the marginal likelihoods
    names = [name for name, _, _ in comps]
    log_post = np.array(
        [np.log(mass) + log_marginal[name] for name, mass, _ in comps]
    )
    log_post -= np.max(log_post)
    q = np.exp(log_post)
    q /= q.sum()
    component_posterior = {name: float(q[i]) for i, name in enumerate(names)}

    # effective sample size of the continuous part; point-mass components
    # are computed exactly and do not dilute it
    sum_sq = 0.0
    q_continuous = 0.0
    for i, (name, _, degenerate) in enumerate(comps):
        if degenerate:
            continue
        ll = loglik[name]
        w = np.exp(ll - np.max(ll))
        w /= w.sum()
        sum_sq += q[i] ** 2 * float(np.sum(w**2))
        q_continuous += q[i]
    ess = q_continuous**2 / sum_sq if sum_sq > 0 else float("inf")
    diagnostics = {
        "component_posterior": component_posterior,
        "per_component_draws": dict(per_comp),
    }
    if q_continuous > 0 and ess < ess_floor * q_continuous:
        raise LowEffectiveSampleError(ess, ess_floor * q_continuous, diagnostics)

    counts = rng.multinomial(M, q)
    lam_out = np.empty(M)
    gam_out = np.empty(M)
    T_out = np.empty(M)
    hr_out = np.empty(M)
    occupancy = {}
    pos = 0
    for i, (name, _, degenerate) in enumerate(comps):
        m_c = int(counts[i])
        occupancy[name] = m_c
        if m_c == 0:
            continue
        lam, gam, T, hr = draws[name]
        if method == "metropolis" and not degenerate:
            sel = _metropolis_component(
                name, data, priors, loglik[name], draws[name], m_c, rng
            )
        else:
            ll = loglik[name]
            w = np.exp(ll - np.max(ll))
            w /= w.sum()
            sel_idx = rng.choice(len(w), size=m_c, p=w)
            sel = (lam[sel_idx], gam[sel_idx], T[sel_idx], hr[sel_idx])
        lam_out[pos : pos + m_c] = sel[0]
        gam_out[pos : pos + m_c] = sel[1]
        T_out[pos : pos + m_c] = sel[2]
        hr_out[pos : pos + m_c] = sel[3]
        pos += m_c

    return PosteriorDraws(
        lambda_c=lam_out,
        gamma_c=gam_out,
        delay_T=T_out,
        post_hr=hr_out,
        weights=np.full(M, 1.0 / M),
        effective_sample_size=float(ess) if q_continuous > 0 else float("inf"),
        occupancy=occupancy,
        component_posterior=component_posterior,
        n_prior_draws=n_prior_draws,
    )


def _metropolis_component(name, data, priors, pilot_ll, pilot_draws, m_c, rng):
    """Random-walk Metropolis in log-parameter space within one component."""
    lam, gam, T, hr = pilot_draws
    w = np.exp(pilot_ll - np.max(pilot_ll))
    w /= w.sum()

    free = []  # (tag, pilot values, prior logpdf fn)
    if not priors.control_lambda.is_point:
        free.append(("lam", lam, priors.control_lambda.logpdf))
    if not priors.control_gamma.is_point:
        free.append(("gam", gam, priors.control_gamma.logpdf))
    if name in ("separation_no_delay", "separation_delay"):
        if not priors.hr_prior.continuous.is_point:
            free.append(("hr", hr, priors.hr_prior.continuous.logpdf))
    if name == "separation_delay":
        if not priors.delay_prior.continuous.is_point:
            free.append(("T", T, priors.delay_prior.continuous.logpdf))

    fixed = {"lam": lam[0], "gam": gam[0], "T": 0.0 if name != "separation_delay" else T[0], "hr": 1.0 if name == "no_separation" else hr[0]}

    logs = np.log(np.vstack([v for _, v, _ in free]))
    mean = np.sum(w * logs, axis=1)
    sd = np.sqrt(np.maximum(np.sum(w * (logs - mean[:, None]) ** 2, axis=1), 1e-6))
    step = 2.4 / np.sqrt(len(free)) * sd

    def unpack(x):
        vals = dict(fixed)
        for (tag, _, _), xi in zip(free, x):
            vals[tag] = np.exp(xi)
        return vals

    def log_target(x):
        vals = unpack(x)
        lp = 0.0
        for (tag, _, logpdf), xi in zip(free, x):
            lp += float(logpdf(np.exp(xi))) + xi  # Jacobian of the log transform
        ll = _loglik_draws(
            data,
            np.array([vals["lam"]]),
            np.array([vals["gam"]]),
            np.array([vals["T"]]),
            np.array([vals["hr"]]),
        )[0]
        return lp + ll

    x = mean.copy()
    lt = log_target(x)
    burn = 200
    thin = 3
    out = []
    total = burn + thin * m_c
    for it in range(total):
        prop = x + rng.normal(0.0, step)
        lt_prop = log_target(prop)
        if np.log(rng.random()) < lt_prop - lt:
            x, lt = prop, lt_prop
        if it >= burn and (it - burn) % thin == 0:
            out.append(x.copy())
    out = np.array(out[:m_c])
    vals = [unpack(row) for row in out]
    return (
        np.array([v["lam"] for v in vals]),
        np.array([v["gam"] for v in vals]),
        np.array([v["T"] for v in vals]),
        np.array([v["hr"] for v in vals]),
    )


@dataclass(frozen=True)
class BPPResult:
    """Predictive probability with per-projection indicators."""

    bpp: float
    indicators: tuple
    mc_se: float


def _inverse_survival_batch(p, lam, gam, T, hr):
    """Invert the piecewise survival function with broadcasting."""
    s_at_knot = np.exp(-((lam * T) ** gam))
    pre = p >= s_at_knot
    neg_log = -np.log(np.maximum(p, _TINY))
    t_pre = neg_log ** (1.0 / gam) / lam
    t_post = (T**gam + (neg_log - (lam * T) ** gam) / (hr * lam**gam)) ** (1.0 / gam)
    return np.where(pre, t_pre, t_post)


def _batch_final_success(
    latent: np.ndarray,
    recruit: np.ndarray,
    is_exp: np.ndarray,
    total_events: int,
    critical: float,
) -> np.ndarray:
    """Per-row final log-rank success on (M, n) latent matrices.

    Uses the tie-free ranked formulation; rows with tied observed times
    fall back to the grouped statistic.
    """
    m, n = latent.shape
    pseudo = latent + recruit[None, :]
    cut = np.partition(pseudo, total_events - 1, axis=1)[:, total_events - 1]
    included = recruit[None, :] <= cut[:, None]
    observed = np.minimum(latent, cut[:, None] - recruit[None, :])
    event = pseudo <= cut[:, None]
    # excluded patients sort to the front with impossible times and no event
    observed = np.where(included, observed, -1.0)
    event &= included

    order = np.argsort(observed, axis=1)
    t_sorted = np.take_along_axis(observed, order, axis=1)
    e_sorted = np.take_along_axis(event, order, axis=1)
    c_sorted = np.take_along_axis(~is_exp[None, :] & included, order, axis=1)

    n_at = (n - np.arange(n))[None, :].astype(float)
    nc_at = np.cumsum(c_sorted[:, ::-1], axis=1)[:, ::-1].astype(float)
    frac = nc_at / n_at
    contrib = np.where(e_sorted, c_sorted - frac, 0.0)
    var = np.where(e_sorted & (n_at > 1), frac * (1.0 - frac), 0.0)
    z = contrib.sum(axis=1) / np.sqrt(np.maximum(var.sum(axis=1), _TINY))

    # exact-tie rows (measure zero in continuous data) get the grouped stat
    tied = np.any((np.diff(t_sorted, axis=1) == 0.0) & (t_sorted[:, 1:] >= 0.0), axis=1)
    for row in np.flatnonzero(tied):
        mask = included[row]
        z[row] = logrank_z(
            np.minimum(latent[row], cut[row] - recruit)[mask],
            (pseudo[row] <= cut[row])[mask],
            is_exp[mask],
        )
    return z > critical


def predictive_probability(
    data: InterimDataset,
    draws: PosteriorDraws,
    design: TrialDesign,
    rng: np.random.Generator,
) -> BPPResult:
    """Project each posterior draw to the final analysis.

    For each draw: censored patients are completed conditionally on their
    observed exposure, patients not yet recruited at the cut get fresh
    survival times, the pooled data are cut at the design's total event
    count, and success is a final log-rank statistic above the final-look
    critical value.
    """
    M = len(draws)
    critical = design.boundaries.efficacy_b[-1]
    n = data.n_patients

    included_idx = np.flatnonzero(data.included)
    cens_mask = ~data.event_flag
    cens_idx = included_idx[cens_mask]
    future_idx = np.flatnonzero(~data.included)
    elapsed = data.observed_time[cens_mask]
    cens_exp = data.is_experimental[cens_mask]
    future_exp = data.all_is_experimental[future_idx]

    lam = draws.lambda_c[:, None]
    gam = draws.gamma_c[:, None]
    T = draws.delay_T[:, None]
    hr = draws.post_hr[:, None]

    latent = np.empty((M, n))
    latent[:, included_idx] = data.observed_time[None, :]

    if len(cens_idx):
        u = rng.random((M, len(cens_idx)))
        el = elapsed[None, :]
        T_eff = np.where(cens_exp[None, :], T, 0.0)
        hr_eff = np.where(cens_exp[None, :], hr, 1.0)
        surv_elapsed = np.where(
            el <= T_eff,
            np.exp(-((lam * el) ** gam)),
            np.exp(-((lam * T_eff) ** gam) - hr_eff * lam**gam * (el**gam - T_eff**gam)),
        )
        latent[:, cens_idx] = _inverse_survival_batch(
            u * surv_elapsed, lam, gam, T_eff, hr_eff
        )
    if len(future_idx):
        u = rng.random((M, len(future_idx)))
        T_eff = np.where(future_exp[None, :], T, 0.0)
        hr_eff = np.where(future_exp[None, :], hr, 1.0)
        latent[:, future_idx] = _inverse_survival_batch(u, lam, gam, T_eff, hr_eff)

    success = _batch_final_success(
        latent,
        data.all_recruit_time,
        data.all_is_experimental,
        design.total_events,
        critical,
    )
    bpp = float(np.mean(success))
    return BPPResult(
        bpp=bpp,
        indicators=tuple(int(s) for s in success),
        mc_se=float(np.sqrt(bpp * (1.0 - bpp) / M)),
    )


def informativeness(bpp_values, upper: float = 0.95, lower: float = 0.05) -> float:
    """Proportion of BPP values strictly outside (lower, upper)."""
    b = np.asarray(bpp_values, dtype=float)
    return float(np.mean((b > upper) | (b < lower)))


def futility_rule(bpp: float, threshold: float) -> bool:
    """True when the trial should stop for futility (bpp strictly below)."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    return bpp < threshold


def _bpp_trial_chunk(args):
    (design, priors, fraction, M, master_seed, start, stop, n_prior_draws) = args
    out = np.empty(stop - start)
    for row, i in enumerate(range(start, stop)):
        lam, gam, T, hr = sample_scenario_arrays(
            priors, 1, substream(master_seed, "bpp-scenario", i)
        )
        scenario = ScenarioDraw(
            control=ControlParams(float(lam[0]), float(gam[0])),
            delay_T=float(T[0]),
            post_hr=float(hr[0]),
        )
        data = generate_patients(
            design, scenario, substream(master_seed, "bpp-patients", i)
        )
        interim = make_interim_dataset(data, design, fraction)
        # trials whose data land in the prior tail collapse the importance
        # weights: escalate the prior-draw budget, then fall back to the
        # Metropolis refinement (deterministic: the attempt path is fixed)
        base_draws = n_prior_draws if n_prior_draws is not None else max(8 * M, 4000)
        draws = None
        for attempt, budget in enumerate((base_draws, 4 * base_draws, 16 * base_draws)):
            try:
                draws = posterior_sample(
                    interim,
                    priors,
                    M,
                    substream(master_seed, "bpp-posterior", i, attempt),
                    n_prior_draws=budget,
                )
                break
            except LowEffectiveSampleError:
                continue
        if draws is None:
            draws = posterior_sample(
                interim,
                priors,
                M,
                substream(master_seed, "bpp-posterior", i, 99),
                n_prior_draws=4 * base_draws,
                ess_floor=0.0,
                method="metropolis",
            )
        result = predictive_probability(
            interim, draws, design, substream(master_seed, "bpp-project", i)
        )
        out[row] = result.bpp
    return out


def design_stage_bpp(
    design: TrialDesign,
    priors: PriorSpec,
    fraction: float,
    N: int,
    M: int,
    master_seed: int,
    workers: int = 1,
    progress=None,
    n_prior_draws: int | None = None,
):
    """Distribution of BPP over N prior-simulated trials cut at a fraction.

    Returns (bpp values, informativeness at the 0.95/0.05 thresholds).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    chunk = max(1, math.ceil(N / max(workers, 1) / 4)) if workers > 1 else N
    jobs = [
        (design, priors, fraction, M, master_seed, s, min(s + chunk, N), n_prior_draws)
        for s in range(0, N, chunk)
    ]
    parts = []
    done = 0
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_bpp_trial_chunk, jobs):
                parts.append(part)
                done += len(part)
                if progress is not None:
                    progress(done / N)
    else:
        for job in jobs:
            part = _bpp_trial_chunk(job)
            parts.append(part)
            done += len(part)
            if progress is not None:
                progress(done / N)
    bpps = np.concatenate(parts)
    return bpps, informativeness(bpps)
