"""Event-driven simulation of one group-sequential trial.

Latent survival times for every patient are generated up front.  At each
look the data cut is the calendar time of the ceil(F_j * E)-th pseudo
event (recruitment time + latent survival); patients recruited after the
cut are excluded from that look's analysis (they re-enter later), and
patients whose event lies beyond the cut are administratively censored at
the cut.

The log-rank statistic is oriented so that Z > 0 favours the experimental
arm: Z = sum(O_c - E_c) / sqrt(sum V) over distinct event times, so the
stopping rule reads "Z below the futility bound stops for futility, Z
above the efficacy bound stops for efficacy".
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .boundaries import BoundarySet
from .dte import ControlParams, ScenarioDraw, sample_control, sample_experimental

__all__ = [
    "TrialDesign",
    "PatientData",
    "PatientRecord",
    "Snapshot",
    "Decision",
    "SequentialOutcome",
    "ZeroVarianceError",
    "recruit",
    "logrank_z",
    "simulate_trial",
    "snapshot_at_events",
]


class ZeroVarianceError(ValueError):
    """Log-rank variance is zero: the statistic is undefined."""


class Decision(str, Enum):
    FUTILITY = "futility"
    EFFICACY = "efficacy"
    FINAL_SUCCESS = "final_success"
    FINAL_FAILURE = "final_failure"


@dataclass(frozen=True)
class TrialDesign:
    """Sample sizes, recruitment, event target and look schedule."""

    n_control: int
    n_experimental: int
    total_events: int
    recruitment_months: float
    boundaries: BoundarySet
    seed: int | None = None

    def __post_init__(self):
        if self.n_control < 1 or self.n_experimental < 1:
            raise ValueError("both arms need at least one patient")
        if self.total_events > self.n_control + self.n_experimental:
            raise ValueError("total_events cannot exceed the number of patients")
        if self.recruitment_months <= 0:
            raise ValueError("recruitment_months must be positive")

    @property
    def fractions(self) -> tuple:
        return self.boundaries.fractions

    @property
    def n_total(self) -> int:
        return self.n_control + self.n_experimental

    def event_targets(self) -> list[int]:
        return [int(np.ceil(f * self.total_events)) for f in self.fractions]


@dataclass
class PatientData:
    """Column-oriented latent dataset for one simulated trial."""

    is_experimental: np.ndarray  # bool
    recruit_time: np.ndarray  # calendar months
    latent_survival: np.ndarray  # months since randomisation

    @property
    def pseudo_event_time(self) -> np.ndarray:
        return self.recruit_time + self.latent_survival

    def __len__(self) -> int:
        return len(self.recruit_time)


@dataclass(frozen=True)
class PatientRecord:
    """Row view of one patient at a given data cut (for inspection/export)."""

    arm: str
    recruit_time: float
    latent_survival: float
    pseudo_event_time: float
    observed_time: float
    event_flag: bool


@dataclass
class Snapshot:
    """Analysis dataset at one data cut."""

    calendar_time: float
    included: np.ndarray  # mask on the full patient set
    observed_time: np.ndarray  # for included patients
    event_flag: np.ndarray
    is_experimental: np.ndarray
    n_events: int

    def records(self, data: PatientData) -> list[PatientRecord]:
        idx = np.flatnonzero(self.included)
        return [
            PatientRecord(
                arm="experimental" if data.is_experimental[i] else "control",
                recruit_time=float(data.recruit_time[i]),
                latent_survival=float(data.latent_survival[i]),
                pseudo_event_time=float(data.pseudo_event_time[i]),
                observed_time=float(self.observed_time[k]),
                event_flag=bool(self.event_flag[k]),
            )
            for k, i in enumerate(idx)
        ]


@dataclass(frozen=True)
class SequentialOutcome:
    """Sequential result of one trial."""

    stop_look: int  # 0-based look index at which the trial stopped
    decision: Decision
    stop_calendar_time: float
    n_recruited_at_stop: int
    z_path: tuple


def recruit(design: TrialDesign, rng: np.random.Generator):
    """Sample arms and recruitment times.

    Recruitment times are i.i.d. Uniform(0, R); each arm gets exactly its
    planned count, randomly interleaved in entry order.
    """
    arm = np.zeros(design.n_total, dtype=bool)
    arm[design.n_control :] = True
    arm = rng.permutation(arm)
    times = rng.random(design.n_total) * design.recruitment_months
    return arm, times


def generate_patients(
    design: TrialDesign, scenario: ScenarioDraw, rng: np.random.Generator
) -> PatientData:
    """Latent dataset for one trial: survival times then recruitment."""
    x_control = sample_control(design.n_control, scenario.control, rng)
    x_experimental = sample_experimental(design.n_experimental, scenario, rng)
    arm, recruit_time = recruit(design, rng)
    latent = np.empty(design.n_total)
    latent[~arm] = x_control
    latent[arm] = x_experimental
    return PatientData(is_experimental=arm, recruit_time=recruit_time, latent_survival=latent)


def snapshot_at_events(data: PatientData, n_events: int) -> Snapshot:
    """Administratively censored dataset at the n-th pseudo event."""
    pseudo = data.pseudo_event_time
    if n_events < 1 or n_events > len(data):
        raise ValueError(f"event target {n_events} out of range")
    cut = np.partition(pseudo, n_events - 1)[n_events - 1]
    included = data.recruit_time <= cut
    observed = np.minimum(data.latent_survival, cut - data.recruit_time)[included]
    event = (pseudo <= cut)[included]
    return Snapshot(
        calendar_time=float(cut),
        included=included,
        observed_time=observed,
        event_flag=event,
        is_experimental=data.is_experimental[included],
        n_events=int(event.sum()),
    )


def logrank_z(observed_time, event_flag, is_experimental) -> float:
    """Standard log-rank Z with hypergeometric variance, ties supported.

    Positive values indicate experimental benefit.  Raises
    ZeroVarianceError when no event time has both arms at risk.
    """
    t = np.asarray(observed_time, dtype=float)
    e = np.asarray(event_flag, dtype=bool)
    grp = np.asarray(is_experimental, dtype=bool)
    if not e.any():
        raise ZeroVarianceError("no events in the dataset")

    order = np.argsort(t, kind="stable")
    t_sorted = t[order]
    ctrl_sorted = ~grp[order]

    event_times = t_sorted[e[order]]
    ctrl_at_event = ctrl_sorted[e[order]]
    unique_times, inverse = np.unique(event_times, return_inverse=True)
    d = np.bincount(inverse).astype(float)
    d_ctrl = np.bincount(inverse, weights=ctrl_at_event.astype(float))

    n = len(t_sorted)
    n_at_risk = n - np.searchsorted(t_sorted, unique_times, side="left")
    ctrl_times_sorted = np.sort(t[~grp])
    n_ctrl_at_risk = len(ctrl_times_sorted) - np.searchsorted(
        ctrl_times_sorted, unique_times, side="left"
    )

    frac = n_ctrl_at_risk / n_at_risk
    observed_minus_expected = float(np.sum(d_ctrl - d * frac))
    multi = n_at_risk > 1
    variance = float(
        np.sum(
            (d * frac * (1.0 - frac) * (n_at_risk - d))[multi]
            / (n_at_risk[multi] - 1.0)
        )
    )
    if variance <= 0.0:
        raise ZeroVarianceError("log-rank variance is zero")
    return observed_minus_expected / np.sqrt(variance)


def sequential_outcome(
    design: TrialDesign, data: PatientData
) -> SequentialOutcome:
    """Apply the look schedule and boundaries to a latent dataset."""
    bounds = design.boundaries
    z_path = []
    for j, target in enumerate(design.event_targets()):
        snap = snapshot_at_events(data, target)
        z = logrank_z(snap.observed_time, snap.event_flag, snap.is_experimental)
        z_path.append(z)
        last = j == bounds.n_looks - 1
        n_recruited = int(snap.included.sum())
        if last:
            decision = (
                Decision.FINAL_SUCCESS if z > bounds.efficacy_b[j] else Decision.FINAL_FAILURE
            )
            return SequentialOutcome(j, decision, snap.calendar_time, n_recruited, tuple(z_path))
        if z < bounds.futility_a[j]:
            return SequentialOutcome(
                j, Decision.FUTILITY, snap.calendar_time, n_recruited, tuple(z_path)
            )
        if z > bounds.efficacy_b[j]:
            return SequentialOutcome(
                j, Decision.EFFICACY, snap.calendar_time, n_recruited, tuple(z_path)
            )
    raise AssertionError("unreachable")


def simulate_trial(
    design: TrialDesign, scenario: ScenarioDraw, rng: np.random.Generator
):
    """Simulate one trial; returns (SequentialOutcome, PatientData).

    The full latent dataset is returned so callers can replay the final
    analysis for counterfactual classification of early stops.
    """
    data = generate_patients(design, scenario, rng)
    return sequential_outcome(design, data), data
