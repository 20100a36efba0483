"""Piecewise-Weibull survival model with a delayed treatment effect.

The control arm follows a Weibull law with scale ``lambda_c`` and shape
``gamma_c``, S_c(t) = exp{-(lambda_c * t)^gamma_c}.  The experimental arm
shares the control hazard up to the delay ``T`` and afterwards has a
constant hazard ratio ``post_hr`` relative to control (the experimental
shape equals the control shape, which is what makes the post-delay hazard
ratio constant).  All times are in months.

Samplers use inverse-transform sampling and draw their uniforms from an
explicitly passed ``numpy.random.Generator``; they are pure functions of
that stream.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ControlParams",
    "ScenarioDraw",
    "survival_control",
    "survival_experimental",
    "hazard_ratio",
    "sample_control",
    "sample_experimental",
    "sample_conditional",
]


@dataclass(frozen=True)
class ControlParams:
    """Weibull parameters of the control arm.

    ``gamma_c = 1`` reduces the law to an Exponential with rate ``lambda_c``.
    """

    lambda_c: float
    gamma_c: float

    def __post_init__(self):
        if not self.lambda_c > 0:
            raise ValueError(f"lambda_c must be positive, got {self.lambda_c}")
        if not self.gamma_c > 0:
            raise ValueError(f"gamma_c must be positive, got {self.gamma_c}")


@dataclass(frozen=True)
class ScenarioDraw:
    """One sampled true state of nature.

    The experimental scale is never stored: it is implied by
    lambda_e^gamma = post_hr * lambda_c^gamma with the experimental shape
    fixed equal to the control shape.  ``post_hr = 1`` with ``delay_T = 0``
    encodes "the survival curves never separate".
    """

    control: ControlParams
    delay_T: float
    post_hr: float

    def __post_init__(self):
        if self.delay_T < 0:
            raise ValueError(f"delay_T must be nonnegative, got {self.delay_T}")
        if not self.post_hr > 0:
            raise ValueError(f"post_hr must be positive, got {self.post_hr}")


def _check_times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be nonnegative")
    return t


def survival_control(t, p: ControlParams):
    """Control-arm survival probability S_c(t) = exp{-(lambda_c t)^gamma_c}."""
    t = _check_times(t)
    out = np.exp(-((p.lambda_c * t) ** p.gamma_c))
    return out if out.ndim else float(out)


def survival_experimental(t, s: ScenarioDraw):
    """Experimental-arm survival probability.

    Equals the control law for t <= delay_T; afterwards the cumulative
    hazard grows at ``post_hr`` times the control rate.  Continuous at the
    delay knot.
    """
    t = _check_times(t)
    lam, gam = s.control.lambda_c, s.control.gamma_c
    T, hr = s.delay_T, s.post_hr
    exponent = np.where(
        t <= T,
        -((lam * t) ** gam),
        -((lam * T) ** gam) - hr * lam**gam * (t**gam - T**gam),
    )
    out = np.exp(exponent)
    return out if out.ndim else float(out)


def hazard_ratio(t, s: ScenarioDraw):
    """Hazard ratio experimental/control: 1 up to the delay, post_hr after."""
    t = _check_times(t)
    out = np.where(t <= s.delay_T, 1.0, s.post_hr)
    return out if out.ndim else float(out)


def _uniforms(n: int, rng: np.random.Generator) -> np.ndarray:
    # open-interval uniforms; u = 0 would map to an infinite survival time
    u = rng.random(n)
    while True:
        bad = u == 0.0
        if not bad.any():
            return u
        u[bad] = rng.random(int(bad.sum()))


def _inverse_survival_control(p, lam: float, gam: float):
    return (-np.log(p)) ** (1.0 / gam) / lam


def _inverse_survival_experimental(p, lam: float, gam: float, T: float, hr: float):
    """Map survival probabilities p to times under the piecewise law."""
    p = np.asarray(p, dtype=float)
    s_at_knot = np.exp(-((lam * T) ** gam))
    pre = p >= s_at_knot
    out = np.empty(p.shape)
    out[pre] = _inverse_survival_control(p[pre], lam, gam)
    out[~pre] = (
        T**gam + (-np.log(p[~pre]) - (lam * T) ** gam) / (hr * lam**gam)
    ) ** (1.0 / gam)
    return out


def sample_control(n: int, p: ControlParams, rng: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. control-arm survival times."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _inverse_survival_control(_uniforms(n, rng), p.lambda_c, p.gamma_c)


def sample_experimental(n: int, s: ScenarioDraw, rng: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. experimental-arm survival times."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lam, gam = s.control.lambda_c, s.control.gamma_c
    return _inverse_survival_experimental(
        _uniforms(n, rng), lam, gam, s.delay_T, s.post_hr
    )


def _survival_at(t, arm_experimental: bool, s: ScenarioDraw):
    if arm_experimental:
        return survival_experimental(t, s)
    return survival_control(t, s.control)


def sample_conditional(
    arm: str, elapsed: float, s: ScenarioDraw, rng: np.random.Generator
) -> float:
    """Draw a survival time conditional on having survived ``elapsed``.

    ``arm`` is "control" or "experimental".  The draw has law
    P(X > t | X > elapsed) = S(t)/S(elapsed) and always exceeds ``elapsed``,
    whichever side of the delay knot the conditioning time lies on.
    """
    if arm not in ("control", "experimental"):
        raise ValueError(f"unknown arm {arm!r}")
    if elapsed < 0:
        raise ValueError("elapsed must be nonnegative")
    experimental = arm == "experimental"
    return float(
        sample_conditional_many(
            np.array([experimental]), np.array([float(elapsed)]), s, rng
        )[0]
    )


def sample_conditional_many(
    is_experimental: np.ndarray,
    elapsed: np.ndarray,
    s: ScenarioDraw,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorised conditional completion for a batch of patients.

    Rescales a fresh uniform by the survival already accrued and inverts
    the appropriate arm's survival function.
    """
    if np.any(elapsed < 0):
        raise ValueError("elapsed must be nonnegative")
    lam, gam = s.control.lambda_c, s.control.gamma_c
    u = _uniforms(len(elapsed), rng)
    s_elapsed = np.where(
        is_experimental,
        survival_experimental(elapsed, s),
        survival_control(elapsed, s.control),
    )
    p = u * s_elapsed
    out = np.empty(len(elapsed))
    exp_mask = np.asarray(is_experimental, dtype=bool)
    if exp_mask.any():
        out[exp_mask] = _inverse_survival_experimental(
            p[exp_mask], lam, gam, s.delay_T, s.post_hr
        )
    if (~exp_mask).any():
        out[~exp_mask] = _inverse_survival_control(p[~exp_mask], lam, gam)
    return out
