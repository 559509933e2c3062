"""Distance measures, exponential-rate fits, and the envelope check.

The distance of a strategy pair to the equilibrium set of the game with
payoff A is measured as ||A^T x||_2 + ||A y||_2: zero exactly on
equilibria, absolutely homogeneous in the state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import COMPLETED, JointState, Trajectory
from .errors import (
    BapViolatedError,
    DimensionMismatchError,
    IndexOutOfPeriodError,
    InsufficientSamplesError,
    NonPositiveSamplesError,
    WrongScheduleKindError,
)
from .linalg import as_matrix, two_norm
from .schedules import (
    BOUNDED_LIKELY,
    POWER,
    PayoffSchedule,
    PeriodicSchedule,
    PerturbedSchedule,
    bap_partial_sums,
)

MIN_WINDOW = 20
MIN_SAMPLES = 40
UNDERFLOW_FLOOR = 1e-300


def delta_stable(a, state: JointState) -> float:
    """||A^T x||_2 + ||A y||_2 for a single payoff matrix."""
    mat = as_matrix(a, "payoff")
    n, m = mat.shape
    if state.x.shape != (n,) or state.y.shape != (m,):
        raise DimensionMismatchError(
            f"state dims {state.x.shape}/{state.y.shape} do not match payoff {n}x{m}"
        )
    return float(np.linalg.norm(mat.T @ state.x) + np.linalg.norm(mat @ state.y))


def delta_periodic(schedule: PeriodicSchedule, state: JointState, i: int) -> float:
    """Distance against the i-th matrix of the period, i in 1..T."""
    if not isinstance(schedule, PeriodicSchedule):
        raise WrongScheduleKindError("delta_periodic needs a periodic schedule")
    if not 1 <= i <= schedule.period:
        raise IndexOutOfPeriodError(f"index {i} outside period {schedule.period}")
    return delta_stable(schedule.matrices[i - 1], state)


@dataclass(frozen=True)
class RateFit:
    """Least-squares slope of ln(delta) against the round index."""

    log_rate_per_round: float
    intercept: float
    window: tuple[int, int]
    r_squared: float
    sample_stride: int


def fit_rate(
    traj: Trajectory,
    measure: str,
    stride: int = 1,
    window_fraction: float = 0.5,
) -> RateFit:
    """Fit an exponential rate to the trailing part of a measure series.

    Samples are taken every ``stride`` rounds (use the period for
    periodic games so within-period oscillation does not bias the
    slope), the fit uses the trailing ``window_fraction`` of them, and
    underflowed samples (below 1e-300) are dropped rather than clamped.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must be in (0, 1]")
    if measure not in traj.deltas:
        raise KeyError(f"measure {measure!r} not recorded on this trajectory")
    series = traj.deltas[measure]
    rounds = np.arange(stride, len(series) + 1, stride)
    samples = series[rounds - 1]
    usable = np.isfinite(samples) & (samples > 0)
    if int(usable.sum()) < MIN_SAMPLES:
        raise InsufficientSamplesError(
            f"need >= {MIN_SAMPLES} positive samples at stride {stride}, "
            f"got {int(usable.sum())}"
        )
    width = max(MIN_WINDOW, int(math.ceil(window_fraction * len(samples))))
    w_rounds = rounds[-width:]
    w_samples = samples[-width:]
    if (w_samples == 0.0).any():
        raise NonPositiveSamplesError("measure hit exact zero inside the fit window")
    keep = w_samples >= UNDERFLOW_FLOOR
    w_rounds, w_samples = w_rounds[keep], w_samples[keep]
    if len(w_samples) < MIN_WINDOW:
        raise NonPositiveSamplesError("underflowed samples left too small a window")
    ts = w_rounds.astype(float)
    logs = np.log(w_samples)
    slope, intercept = np.polyfit(ts, logs, 1)
    resid = logs - (slope * ts + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((logs - logs.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot <= 1e-30 else max(0.0, 1.0 - ss_res / ss_tot)
    return RateFit(
        log_rate_per_round=float(slope),
        intercept=float(intercept),
        window=(int(w_rounds[0]), int(w_rounds[-1])),
        r_squared=r2,
        sample_stride=stride,
    )


@dataclass(frozen=True)
class EnvelopeCheck:
    """Result of testing delta_t <= C * f(t) past the calibration half."""

    fitted_constant: float
    violations: int
    horizon: int


def envelope(
    schedule: PerturbedSchedule, rounds: int, lambda_est: float
) -> np.ndarray:
    """f(t) = max(lambda^t, sum_{i >= t/2} ||B_i||_2) for t = 1..rounds.

    The tail sum is truncated at 10x the horizon; for power-law decay
    the analytic integral bound covers the rest.
    """
    if not 0 < lambda_est < 1:
        raise ValueError("lambda_est must lie in (0, 1)")
    cap = 10 * rounds
    norm_base = two_norm(schedule.base)
    per_round = norm_base * schedule.factors(np.arange(1, cap + 1))
    beyond = 0.0
    if schedule.decay == POWER and schedule.exponent > 1:
        p = schedule.exponent
        beyond = norm_base * (cap + 1) ** (1 - p) / (p - 1)
    # tails[j] = sum_{i > j} per_round[i-1] + beyond, so tail from i0 is tails[i0-1]
    tails = np.concatenate([np.cumsum(per_round[::-1])[::-1], [0.0]]) + beyond
    ts = np.arange(1, rounds + 1)
    start = np.ceil(ts / 2).astype(int)
    with np.errstate(under="ignore"):
        geom = lambda_est ** ts.astype(float)
    return np.maximum(geom, tails[start - 1])


def envelope_check(
    traj: Trajectory,
    schedule: PerturbedSchedule,
    lambda_est: float,
    measure: str = "delta_stable",
) -> EnvelopeCheck:
    """Calibrate C on the first half of the run, count violations after.

    Only meaningful when the accumulated perturbations are summable;
    schedules that fail the analytic test raise BapViolatedError.
    """
    if not isinstance(schedule, PerturbedSchedule):
        raise WrongScheduleKindError("envelope check needs a perturbed schedule")
    _, verdict = bap_partial_sums(schedule, 1)
    if verdict != BOUNDED_LIKELY:
        raise BapViolatedError(f"perturbation verdict is {verdict}")
    if traj.status != COMPLETED:
        raise ValueError(f"trajectory status is {traj.status}, not completed")
    series = traj.deltas[measure]
    rounds = len(series)
    if rounds < 2:
        raise InsufficientSamplesError("trajectory too short for an envelope check")
    f = envelope(schedule, rounds, lambda_est)
    half = rounds // 2
    fitted = float(np.max(series[:half] / f[:half]))
    violations = int(np.count_nonzero(series[half:] > fitted * f[half:]))
    return EnvelopeCheck(fitted_constant=fitted, violations=violations, horizon=rounds)
