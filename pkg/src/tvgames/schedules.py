"""Payoff schedules: how the game matrix varies with the round number.

Rounds are 1-indexed. A periodic schedule maps round t to entry
(t-1) mod T; a perturbed schedule returns ``stable + base * g(t)`` for
one of three decay laws; an explicit schedule plays out a finite list
and then repeats its tail matrix forever.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import WrongScheduleKindError
from .linalg import as_matrix, two_norm

POWER = "power"          # g(t) = t**-p
LOG_POWER = "log"        # g(t) = log(t)**-p for t >= 2, g(1) = g(2)
ALTERNATING = "alternating"  # g(t) = t**-p on even t, 0 on odd t
DECAY_KINDS = (POWER, LOG_POWER, ALTERNATING)

BOUNDED_LIKELY = "BoundedLikely"
DIVERGENT_LIKELY = "DivergentLikely"
INCONCLUSIVE = "Inconclusive"


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PeriodicSchedule:
    """A_t cycles through ``matrices`` with period T = len(matrices)."""

    matrices: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(_freeze(as_matrix(m, "payoff")) for m in self.matrices)
        if not mats:
            raise ValueError("periodic schedule needs at least one matrix")
        if len({m.shape for m in mats}) != 1:
            raise ValueError("all payoff matrices must share one shape")
        object.__setattr__(self, "matrices", mats)

    @property
    def period(self) -> int:
        return len(self.matrices)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrices[0].shape

    def payoff_at(self, t: int) -> np.ndarray:
        if t < 1:
            raise ValueError(f"round must be >= 1, got {t}")
        return self.matrices[(t - 1) % self.period]


@dataclass(frozen=True)
class PerturbedSchedule:
    """A_t = stable + base * g(t) for a decaying law g."""

    stable: np.ndarray
    base: np.ndarray
    decay: str
    exponent: float

    def __post_init__(self):
        stable = _freeze(as_matrix(self.stable, "stable payoff"))
        base = _freeze(as_matrix(self.base, "perturbation base"))
        if stable.shape != base.shape:
            raise ValueError("stable and base matrices must share one shape")
        if self.decay not in DECAY_KINDS:
            raise ValueError(f"unknown decay law {self.decay!r}")
        if not self.exponent > 0:
            raise ValueError("decay exponent must be > 0")
        object.__setattr__(self, "stable", stable)
        object.__setattr__(self, "base", base)

    @property
    def shape(self) -> tuple[int, int]:
        return self.stable.shape

    def factor(self, t: int) -> float:
        """The scalar g(t) applied to the base perturbation."""
        if t < 1:
            raise ValueError(f"round must be >= 1, got {t}")
        p = self.exponent
        if self.decay == POWER:
            return float(t) ** -p
        if self.decay == LOG_POWER:
            return float(np.log(max(t, 2))) ** -p
        return float(t) ** -p if t % 2 == 0 else 0.0

    def factors(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized ``factor`` over an array of rounds."""
        ts = np.asarray(ts, dtype=float)
        p = self.exponent
        if self.decay == POWER:
            return ts**-p
        if self.decay == LOG_POWER:
            return np.log(np.maximum(ts, 2.0)) ** -p
        g = ts**-p
        g[np.asarray(ts, dtype=int) % 2 == 1] = 0.0
        return g

    def payoff_at(self, t: int) -> np.ndarray:
        return self.stable + self.factor(t) * self.base


@dataclass(frozen=True)
class ExplicitSchedule:
    """A finite list of payoff matrices; rounds past the list return tail."""

    matrices: tuple[np.ndarray, ...]
    tail: np.ndarray

    def __post_init__(self):
        mats = tuple(_freeze(as_matrix(m, "payoff")) for m in self.matrices)
        tail = _freeze(as_matrix(self.tail, "tail payoff"))
        if any(m.shape != tail.shape for m in mats):
            raise ValueError("all payoff matrices must share one shape")
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "tail", tail)

    @property
    def shape(self) -> tuple[int, int]:
        return self.tail.shape

    def payoff_at(self, t: int) -> np.ndarray:
        if t < 1:
            raise ValueError(f"round must be >= 1, got {t}")
        if t <= len(self.matrices):
            return self.matrices[t - 1]
        return self.tail


PayoffSchedule = PeriodicSchedule | PerturbedSchedule | ExplicitSchedule


def payoff_at(schedule: PayoffSchedule, t: int) -> np.ndarray:
    """Payoff matrix for round t >= 1."""
    return schedule.payoff_at(t)


def stable_matrix(schedule: PayoffSchedule) -> np.ndarray:
    """The limiting payoff matrix the schedule settles on.

    Perturbed schedules converge to their stable matrix, explicit
    schedules to their tail. Periodic schedules have no limit.
    """
    if isinstance(schedule, PerturbedSchedule):
        return schedule.stable
    if isinstance(schedule, ExplicitSchedule):
        return schedule.tail
    raise WrongScheduleKindError("periodic schedules have no stable matrix")


def bap_partial_sums(
    schedule: PayoffSchedule, horizon: int
) -> tuple[np.ndarray, str]:
    """Partial sums of ||B_t||_2 up to ``horizon`` plus a boundedness verdict.

    The verdict is analytic, from the decay law alone: powers (plain or
    alternating) are summable iff the exponent exceeds 1, log powers
    never are. The numeric sums are returned so callers can judge for
    themselves.
    """
    if not isinstance(schedule, PerturbedSchedule):
        raise WrongScheduleKindError("BAP sums need a perturbed schedule")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    norm_base = two_norm(schedule.base)
    ts = np.arange(1, horizon + 1)
    sums = np.cumsum(norm_base * schedule.factors(ts))
    if schedule.decay == LOG_POWER:
        verdict = DIVERGENT_LIKELY
    elif schedule.exponent > 1:
        verdict = BOUNDED_LIKELY
    else:
        verdict = DIVERGENT_LIKELY
    return sums, verdict
