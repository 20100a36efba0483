"""Group-sequential efficacy and futility boundaries from error spending.

Boundaries are computed on the z-scale under the standard sequential
Brownian-motion model: statistics at information fractions t_1 < ... < t_L
are jointly normal with Corr(Z_i, Z_j) = sqrt(t_i / t_j) and drift
theta * sqrt(t) under an alternative with final-look drift theta.

Futility boundaries come from beta spending and are binding by default:
the alpha recursion only propagates paths inside [a_j, b_j], matching a
stopping rule that halts unconditionally at either boundary.  Unless an
explicit drift is supplied, the alternative drift is calibrated so that
the futility and efficacy boundaries meet at the final look, i.e. the
design spends exactly its type II error budget.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.special import ndtr, ndtri

__all__ = [
    "SpendingSpec",
    "BoundarySet",
    "InfeasibleSpendError",
    "spend",
    "compute_boundaries",
    "drift_for_alternative",
]

_RULES = ("obf_type", "pocock_type", "direct")
NO_FUTILITY = -np.inf


class InfeasibleSpendError(ValueError):
    """Raised when a spending allocation forces a_j >= b_j at an interim."""

    def __init__(self, look_index: int, message: str):
        self.look_index = look_index
        super().__init__(message)


@dataclass(frozen=True)
class SpendingSpec:
    """Alpha/beta spending configuration (one-sided testing).

    ``direct_cumulative`` lists (information fraction, cumulative alpha,
    cumulative beta) rows, one per look, ending at (1, total_alpha,
    total_beta); it is required by the ``direct`` rule and ignored
    otherwise.  ``total_beta = 0`` disables futility stopping entirely.
    """

    total_alpha: float = 0.025
    total_beta: float = 0.10
    alpha_rule: str = "obf_type"
    beta_rule: str = "obf_type"
    direct_cumulative: tuple | None = None
    binding_futility: bool = True

    def __post_init__(self):
        if not 0.0 < self.total_alpha < 1.0:
            raise ValueError("total_alpha must lie in (0, 1)")
        if not 0.0 <= self.total_beta < 1.0:
            raise ValueError("total_beta must lie in [0, 1)")
        for rule in (self.alpha_rule, self.beta_rule):
            if rule not in _RULES:
                raise ValueError(f"unknown spending rule {rule!r}")
        if self.direct_cumulative is not None:
            rows = tuple(tuple(float(x) for x in row) for row in self.direct_cumulative)
            object.__setattr__(self, "direct_cumulative", rows)
            fr = [r[0] for r in rows]
            ca = [r[1] for r in rows]
            cb = [r[2] for r in rows]
            if np.any(np.diff(fr) <= 0) or np.any(np.diff(ca) < 0) or np.any(np.diff(cb) < 0):
                raise ValueError("direct_cumulative must be nondecreasing")
            if abs(fr[-1] - 1.0) > 1e-12 or abs(ca[-1] - self.total_alpha) > 1e-12 \
                    or abs(cb[-1] - self.total_beta) > 1e-12:
                raise ValueError(
                    "direct_cumulative must end at (1, total_alpha, total_beta)"
                )
        elif "direct" in (self.alpha_rule, self.beta_rule):
            raise ValueError("direct rule requires direct_cumulative")

    @property
    def futility_enabled(self) -> bool:
        return self.total_beta > 0.0


@dataclass(frozen=True)
class BoundarySet:
    """Z-scale stopping boundaries at each look.

    ``futility_a[j] < efficacy_b[j]`` at interims; at the final look the
    two coincide so a decision is forced.  ``drift`` records the
    alternative used for beta spending (final-look noncentrality).
    """

    fractions: tuple
    efficacy_b: tuple
    futility_a: tuple
    drift: float = 0.0
    cumulative_alpha: tuple = field(default=())
    cumulative_beta: tuple = field(default=())

    def __post_init__(self):
        fr = np.asarray(self.fractions, dtype=float)
        if len(fr) == 0 or np.any(np.diff(fr) <= 0) or abs(fr[-1] - 1.0) > 1e-12:
            raise ValueError("fractions must be strictly increasing and end at 1")
        if len(self.efficacy_b) != len(fr) or len(self.futility_a) != len(fr):
            raise ValueError("boundary lengths must match fractions")
        a, b = self.futility_a, self.efficacy_b
        if abs(a[-1] - b[-1]) > 1e-9:
            raise ValueError("final futility and efficacy boundaries must coincide")
        for j in range(len(fr) - 1):
            if not a[j] < b[j]:
                raise ValueError(f"futility_a[{j}] must lie below efficacy_b[{j}]")

    @property
    def n_looks(self) -> int:
        return len(self.fractions)


def _cumulative_spend(rule: str, total: float, fraction: float, table, column: int) -> float:
    if fraction <= 0.0 or fraction > 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    if total == 0.0:
        return 0.0
    if rule == "obf_type":
        # Lan-DeMets O'Brien-Fleming-type: 2 - 2*Phi(z_{q/2} / sqrt(t))
        return float(2.0 - 2.0 * ndtr(ndtri(1.0 - total / 2.0) / np.sqrt(fraction)))
    if rule == "pocock_type":
        return float(total * np.log(1.0 + (np.e - 1.0) * fraction))
    if rule == "direct":
        if table is None:
            raise ValueError("direct rule requires a cumulative table")
        for row in table:
            if abs(row[0] - fraction) < 1e-9:
                return float(row[column])
        raise ValueError(f"no direct spending entry for fraction {fraction}")
    raise ValueError(f"unknown spending rule {rule!r}")


def spend(rule: str, total: float, fraction: float, direct_table=None, column: int = 1) -> float:
    """Cumulative error spent at an information fraction under a rule.

    For the ``direct`` rule, pass the cumulative table and the column to
    read (1 = alpha, 2 = beta).
    """
    return _cumulative_spend(rule, total, fraction, direct_table, column)


def drift_for_alternative(
    hr_design: float, total_events: int, allocation_ratio: float = 1.0
) -> float:
    """Final-look log-rank drift for a design alternative hazard ratio.

    Schoenfeld approximation: theta = -log(HR) * sqrt(E * r / (1 + r)^2)
    with allocation ratio r; drift at fraction t scales as sqrt(t).
    """
    if total_events <= 0:
        raise ValueError("total_events must be positive")
    r = allocation_ratio
    info = total_events * r / (1.0 + r) ** 2
    return float(-np.log(hr_design) * np.sqrt(info))


def _simpson_weights(n: int, h: float) -> np.ndarray:
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


_BIG = 1e3


class _Recursion:
    """Sub-density of non-stopped sample paths on the score scale."""

    def __init__(self, drift: float, nodes: int):
        self.drift = drift
        self.nodes = nodes
        self.grid = None
        self.dens = None
        self.w = None
        self.prev_t = 0.0

    def reach_probability(self) -> float:
        return float(np.dot(self.w, self.dens))

    def tail_above(self, x: float, t: float) -> float:
        dt = t - self.prev_t
        sd = np.sqrt(dt)
        if self.grid is None:
            return float(1.0 - ndtr((x - self.drift * t) / np.sqrt(t)))
        z = (x - self.grid - self.drift * dt) / sd
        return float(np.dot(self.w * self.dens, 1.0 - ndtr(z)))

    def mass_below(self, x: float, t: float) -> float:
        dt = t - self.prev_t
        sd = np.sqrt(dt)
        if self.grid is None:
            return float(ndtr((x - self.drift * t) / np.sqrt(t)))
        z = (x - self.grid - self.drift * dt) / sd
        return float(np.dot(self.w * self.dens, ndtr(z)))

    def advance(self, lo: float, hi: float, t: float):
        dt = t - self.prev_t
        sd = np.sqrt(dt)
        new_grid = np.linspace(lo, hi, self.nodes)
        if self.grid is None:
            dens = np.exp(-((new_grid - self.drift * t) ** 2) / (2.0 * t)) / np.sqrt(
                2.0 * np.pi * t
            )
        else:
            kernel = np.exp(
                -((new_grid[None, :] - self.grid[:, None] - self.drift * dt) ** 2)
                / (2.0 * dt)
            ) / (sd * np.sqrt(2.0 * np.pi))
            dens = (self.dens * self.w) @ kernel
        self.grid = new_grid
        self.dens = dens
        self.w = _simpson_weights(self.nodes, new_grid[1] - new_grid[0])
        self.prev_t = t


def _solve_boundaries(fractions, cum_alpha, cum_beta, theta, nodes, binding, span):
    """One pass of the dual recursion for a given drift.

    Returns (a, b, gap) where gap = a_L - b_L on the score scale; a
    positive "big" gap encodes infeasibility (drift too large to spend
    the allocated errors).
    """
    L = len(fractions)
    a = np.full(L, NO_FUTILITY)
    b = np.full(L, np.inf)
    null_rec = _Recursion(0.0, nodes)
    alt_rec = _Recursion(theta, nodes) if cum_beta[-1] > 0 else None

    for j in range(L):
        t = fractions[j]
        root_t = np.sqrt(t)
        alpha_inc = cum_alpha[j] - (cum_alpha[j - 1] if j else 0.0)
        beta_inc = cum_beta[j] - (cum_beta[j - 1] if j else 0.0)

        if j > 0:
            if alpha_inc >= null_rec.reach_probability():
                return a, b, _BIG * (1.0 + alpha_inc - null_rec.reach_probability()), j
            if alt_rec is not None and beta_inc >= alt_rec.reach_probability():
                return a, b, _BIG * (1.0 + beta_inc - alt_rec.reach_probability()), j

        if alpha_inc > 0:
            bz = optimize.brentq(
                lambda x: null_rec.tail_above(x, t) - alpha_inc, -60, 60, xtol=1e-12
            )
        else:
            bz = np.inf
        if alt_rec is not None and beta_inc > 0:
            az = optimize.brentq(
                lambda x: alt_rec.mass_below(x, t) - beta_inc, -60, 60, xtol=1e-12
            )
        else:
            az = -np.inf

        b[j] = bz / root_t
        a[j] = az / root_t if np.isfinite(az) else NO_FUTILITY
        if j == L - 1:
            return a, b, (az - bz) if np.isfinite(az) else 0.0, j
        if az >= bz:
            return a, b, _BIG + (az - bz), j

        hi = bz if np.isfinite(bz) else span * np.sqrt(t)
        lo_null = az if (binding and np.isfinite(az)) else -span * np.sqrt(t)
        expected_reach = null_rec.reach_probability() if j else 1.0
        expected_reach -= alpha_inc
        if binding and np.isfinite(az):
            expected_reach -= null_rec.mass_below(az, t)
        null_rec.advance(lo_null, hi, t)
        # the truncated sub-density must integrate to the probability of
        # reaching the next look; drift beyond tolerance means the grid
        # cannot resolve this spending allocation
        if abs(null_rec.reach_probability() - expected_reach) > 1e-4:
            raise InfeasibleSpendError(
                j,
                f"integration drift {abs(null_rec.reach_probability() - expected_reach):.2e} "
                f"at look {j}; increase the grid resolution",
            )
        if alt_rec is not None:
            lo_alt = az if np.isfinite(az) else min(0.0, theta * t) - span * np.sqrt(t)
            alt_rec.advance(lo_alt, hi, t)
    raise AssertionError("unreachable")


def compute_boundaries(
    spec: SpendingSpec,
    fractions,
    drift: float | None = None,
    nodes: int = 301,
    span: float = 8.0,
) -> BoundarySet:
    """Solve the spending recursion for a look schedule.

    ``drift`` is the final-look noncentrality of the design alternative
    used for beta spending.  When omitted it is calibrated so the futility
    and efficacy boundaries meet at the final look (the conventional
    power-consistent choice); pass a value from
    :func:`drift_for_alternative` to pin a specific alternative instead.
    """
    fractions = tuple(float(f) for f in fractions)
    fr = np.asarray(fractions)
    if len(fr) == 0 or np.any(np.diff(fr) <= 0) or abs(fr[-1] - 1.0) > 1e-12:
        raise ValueError("fractions must be strictly increasing and end at 1")

    cum_alpha = [
        spend(spec.alpha_rule, spec.total_alpha, f, spec.direct_cumulative, column=1)
        for f in fractions
    ]
    cum_beta = [
        spend(spec.beta_rule, spec.total_beta, f, spec.direct_cumulative, column=2)
        if spec.futility_enabled
        else 0.0
        for f in fractions
    ]
    cum_alpha[-1] = spec.total_alpha
    if spec.futility_enabled:
        cum_beta[-1] = spec.total_beta

    def run(theta):
        return _solve_boundaries(
            fr, cum_alpha, cum_beta, theta, nodes, spec.binding_futility, span
        )

    if not spec.futility_enabled:
        theta = 0.0
        a, b, _, _ = run(theta)
    elif drift is not None:
        theta = float(drift)
        a, b, gap, look = run(theta)
        if gap >= _BIG:
            raise InfeasibleSpendError(
                look,
                f"spending allocation infeasible at look {look} "
                f"(futility would cross efficacy) for drift {theta:.4f}",
            )
    else:
        gap_at = lambda th: run(th)[2]
        # bracket the boundary-meeting drift; the fixed-design value
        # z_{1-alpha} + z_{1-beta} is always a sensible neighbourhood
        centre = ndtri(1.0 - spec.total_alpha) + ndtri(1.0 - spec.total_beta)
        lo, hi = None, None
        for candidate in np.concatenate(
            [np.linspace(max(centre - 2.5, 0.05), centre + 3.0, 23), [8.0, 10.0]]
        ):
            g = gap_at(candidate)
            if g < 0:
                lo = candidate
            elif lo is not None:
                hi = candidate
                break
        if lo is None or hi is None:
            raise InfeasibleSpendError(0, "could not calibrate a drift for this spend")
        theta = optimize.brentq(gap_at, lo, hi, xtol=1e-10)
        a, b, _, _ = run(theta)

    a[-1] = b[-1]
    return BoundarySet(
        fractions=fractions,
        efficacy_b=tuple(float(x) for x in b),
        futility_a=tuple(float(x) for x in a),
        drift=float(theta),
        cumulative_alpha=tuple(cum_alpha),
        cumulative_beta=tuple(cum_beta),
    )
