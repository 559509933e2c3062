"""The three learning dynamics and their linear-difference-system form.

Each method can be stepped two ways: ``direct`` applies the update rules
as written, ``matrix`` multiplies the stacked state by the round's
iterative matrix. The two paths agree to floating-point accuracy; the
matrix path is chunked and vectorized for long runs.

Conventions (fixed here, used everywhere):

* rounds are 1-indexed; round t maps the state after round t-1 to the
  state after round t,
* the update at round t reads payoffs A_t and, for the two-step
  methods, A_{t-1} (optimistic) or A_{t+1} (alternating momentum),
* at t = 1 the optimistic method needs A_0 and (x_{-1}, y_{-1}); we set
  A_0 := A_1 and default the previous iterate to the initial one unless
  the caller supplies it,
* the stacked state is (x, y) for the extra-gradient method and
  (x, y, x_prev, y_prev) for the other two.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatchError, IndexOutOfPeriodError, WrongScheduleKindError
from .linalg import two_norm
from .schedules import (
    ExplicitSchedule,
    PayoffSchedule,
    PeriodicSchedule,
    PerturbedSchedule,
    stable_matrix,
)

EG = "eg"
OGDA = "ogda"
NM = "nm"
METHODS = (EG, OGDA, NM)

DIRECT = "direct"
MATRIX = "matrix"

COMPLETED = "completed"
DIVERGED = "diverged"
UNDERFLOW = "underflow"

#: Early-stop guards on the joint strategy norm and the requested measures.
DIVERGENCE_GUARD = 1e150
UNDERFLOW_GUARD = 1e-300

_CHUNK = 16384


@dataclass(frozen=True)
class DynamicsConfig:
    """Method selector plus hyperparameters; unset fields take paper defaults.

    eta is the step of the optimistic and momentum methods, (alpha,
    gamma) the full/half steps of the extra-gradient method, (beta1,
    beta2) the momentum coefficients (<= 0).
    """

    method: str
    eta: float | None = None
    alpha: float | None = None
    gamma: float | None = None
    beta1: float | None = None
    beta2: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        for name in ("eta", "alpha", "gamma"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be > 0, got {v}")
        for name in ("beta1", "beta2"):
            v = getattr(self, name)
            if v is not None and v > 0:
                raise ValueError(f"{name} must be <= 0, got {v}")

    def resolved(self, schedule: PayoffSchedule) -> "DynamicsConfig":
        """Fill unset hyperparameters from the schedule's leading matrix.

        Defaults follow the safe-step recipe: with sigma the largest
        singular value of the stable (or first) payoff matrix, the
        extra-gradient and optimistic steps are 0.9/(2 sigma), the
        momentum step 0.9/sigma with beta1 = -1/2, beta2 = 0.
        """
        lead = (
            schedule.matrices[0]
            if isinstance(schedule, PeriodicSchedule)
            else stable_matrix(schedule)
        )
        sigma = two_norm(lead)
        safe = 0.1 if sigma == 0.0 else None  # zero game: any step is fine
        cfg = self
        if cfg.method == EG:
            alpha = cfg.alpha if cfg.alpha is not None else safe or 0.9 / (2 * sigma)
            gamma = cfg.gamma if cfg.gamma is not None else alpha
            cfg = replace(cfg, alpha=alpha, gamma=gamma)
        elif cfg.method == OGDA:
            eta = cfg.eta if cfg.eta is not None else safe or 0.9 / (2 * sigma)
            cfg = replace(cfg, eta=eta)
        else:
            eta = cfg.eta if cfg.eta is not None else safe or 0.9 / sigma
            beta1 = cfg.beta1 if cfg.beta1 is not None else -0.5
            beta2 = cfg.beta2 if cfg.beta2 is not None else 0.0
            cfg = replace(cfg, eta=eta, beta1=beta1, beta2=beta2)
        return cfg


def _vec(v, length: int, name: str) -> np.ndarray:
    out = np.asarray(v, dtype=float).reshape(-1)
    if out.shape != (length,):
        raise DimensionMismatchError(f"{name} must have length {length}, got {out.shape}")
    return out


@dataclass(frozen=True)
class JointState:
    """Strategies (x, y) plus the previous iterate used by OGDA and NM."""

    x: np.ndarray
    y: np.ndarray
    x_prev: np.ndarray
    y_prev: np.ndarray

    @classmethod
    def make(cls, x, y, x_prev=None, y_prev=None) -> "JointState":
        x = np.asarray(x, dtype=float).reshape(-1)
        y = np.asarray(y, dtype=float).reshape(-1)
        xp = x.copy() if x_prev is None else _vec(x_prev, len(x), "x_prev")
        yp = y.copy() if y_prev is None else _vec(y_prev, len(y), "y_prev")
        return cls(x=x, y=y, x_prev=xp, y_prev=yp)

    def stacked(self, method: str) -> np.ndarray:
        if method == EG:
            return np.concatenate([self.x, self.y])
        return np.concatenate([self.x, self.y, self.x_prev, self.y_prev])

    def joint_norm(self) -> float:
        return float(np.sqrt(self.x @ self.x + self.y @ self.y))


def _check_dims(schedule: PayoffSchedule, state: JointState) -> tuple[int, int]:
    n, m = schedule.shape
    if state.x.shape != (n,) or state.y.shape != (m,):
        raise DimensionMismatchError(
            f"state dims {state.x.shape}/{state.y.shape} do not match payoff {n}x{m}"
        )
    return n, m


def step_direct(
    cfg: DynamicsConfig, schedule: PayoffSchedule, state: JointState, t: int
) -> JointState:
    """One round of the configured dynamics by its textbook update rule."""
    _check_dims(schedule, state)
    a_t = schedule.payoff_at(t)
    if cfg.method == EG:
        x_half = state.x - cfg.gamma * (a_t @ state.y)
        y_half = state.y + cfg.gamma * (a_t.T @ state.x)
        x_new = state.x - cfg.alpha * (a_t @ y_half)
        y_new = state.y + cfg.alpha * (a_t.T @ x_half)
    elif cfg.method == OGDA:
        a_prev = schedule.payoff_at(t - 1) if t > 1 else a_t
        x_new = state.x - 2 * cfg.eta * (a_t @ state.y) + cfg.eta * (a_prev @ state.y_prev)
        y_new = state.y + 2 * cfg.eta * (a_t.T @ state.x) - cfg.eta * (a_prev.T @ state.x_prev)
    else:
        a_next = schedule.payoff_at(t + 1)
        x_new = state.x - cfg.eta * (a_t @ state.y) + cfg.beta1 * (state.x - state.x_prev)
        y_new = (
            state.y
            + cfg.eta * (a_next.T @ x_new)
            + cfg.beta2 * (state.y - state.y_prev)
        )
    return JointState(x=x_new, y=y_new, x_prev=state.x, y_prev=state.y)


def iterative_matrix(
    cfg: DynamicsConfig,
    schedule: PayoffSchedule,
    t: int,
    periodic_wrap: bool = False,
) -> np.ndarray:
    """The square matrix mapping the stacked state across round t.

    ``periodic_wrap`` selects the Floquet convention for the optimistic
    method's A_{t-1} at t = 1 (wrap to A_T instead of the simulation
    bootstrap A_0 := A_1); it requires a periodic schedule.
    """
    n, m = schedule.shape
    a_t = schedule.payoff_at(t)
    eye_n, eye_m = np.eye(n), np.eye(m)
    z = np.zeros
    if cfg.method == EG:
        a, g = cfg.alpha, cfg.gamma
        return np.block(
            [
                [eye_n - a * g * (a_t @ a_t.T), -a * a_t],
                [a * a_t.T, eye_m - g * a * (a_t.T @ a_t)],
            ]
        )
    if cfg.method == OGDA:
        if t > 1:
            a_prev = schedule.payoff_at(t - 1)
        elif periodic_wrap:
            if not isinstance(schedule, PeriodicSchedule):
                raise WrongScheduleKindError("periodic_wrap needs a periodic schedule")
            a_prev = schedule.payoff_at(schedule.period)
        else:
            a_prev = a_t
        e = cfg.eta
        return np.block(
            [
                [eye_n, -2 * e * a_t, z((n, n)), e * a_prev],
                [2 * e * a_t.T, eye_m, -e * a_prev.T, z((m, m))],
                [eye_n, z((n, m)), z((n, n)), z((n, m))],
                [z((m, n)), eye_m, z((m, n)), z((m, m))],
            ]
        )
    a_next = schedule.payoff_at(t + 1)
    e, b1, b2 = cfg.eta, cfg.beta1, cfg.beta2
    return np.block(
        [
            [(1 + b1) * eye_n, -e * a_t, -b1 * eye_n, z((n, m))],
            [
                e * (1 + b1) * a_next.T,
                (1 + b2) * eye_m - e**2 * (a_next.T @ a_t),
                -e * b1 * a_next.T,
                -b2 * eye_m,
            ],
            [eye_n, z((n, m)), z((n, n)), z((n, m))],
            [z((m, n)), eye_m, z((m, n)), z((m, m))],
        ]
    )


# ---------------------------------------------------------------------------
# Measures


def resolve_measures(
    schedule: PayoffSchedule, measures=None
) -> list[tuple[str, np.ndarray]]:
    """Map measure ids to the payoff matrix each distance is taken against.

    Periodic schedules default to one measure per period entry
    (``delta_1`` .. ``delta_T``); the other kinds default to
    ``delta_stable`` against the limiting matrix.
    """
    if measures is None:
        if isinstance(schedule, PeriodicSchedule):
            measures = [f"delta_{i}" for i in range(1, schedule.period + 1)]
        else:
            measures = ["delta_stable"]
    out = []
    for mid in measures:
        if mid == "delta_stable":
            out.append((mid, stable_matrix(schedule)))
        elif mid.startswith("delta_"):
            if not isinstance(schedule, PeriodicSchedule):
                raise WrongScheduleKindError(f"{mid} needs a periodic schedule")
            i = int(mid.split("_", 1)[1])
            if not 1 <= i <= schedule.period:
                raise IndexOutOfPeriodError(f"{mid} outside period {schedule.period}")
            out.append((mid, schedule.matrices[i - 1]))
        else:
            raise ValueError(f"unknown measure id {mid!r}")
    return out


@dataclass
class Trajectory:
    """Per-round record of a simulation.

    ``xs``/``ys`` hold the strategy after each completed round (row t-1
    is the state after round t); ``deltas`` maps each measure id to its
    per-round values; ``joint_norms`` is ||(x, y)||_2 per round. The
    run stops early with status ``diverged`` the first time the joint
    norm exceeds 1e150, or ``underflow`` the first time every requested
    measure is positive but below 1e-300.
    """

    init: JointState
    xs: np.ndarray
    ys: np.ndarray
    deltas: dict[str, np.ndarray]
    joint_norms: np.ndarray
    status: str
    at_round: int | None = None

    @property
    def rounds_completed(self) -> int:
        return len(self.joint_norms)

    def state(self, t: int) -> JointState:
        """Joint state after round t (1-indexed), previous iterate included."""
        if not 1 <= t <= self.rounds_completed:
            raise IndexError(f"round {t} outside 1..{self.rounds_completed}")
        if t == 1:
            xp, yp = self.init.x, self.init.y
        else:
            xp, yp = self.xs[t - 2], self.ys[t - 2]
        return JointState(x=self.xs[t - 1], y=self.ys[t - 1], x_prev=xp, y_prev=yp)


def _delta_row(pairs, x: np.ndarray, y: np.ndarray) -> list[float]:
    out = []
    for _, a in pairs:
        atx = a.T @ x
        ay = a @ y
        out.append(float(np.sqrt(atx @ atx)) + float(np.sqrt(ay @ ay)))
    return out


def _payoff_batch(schedule: PayoffSchedule, ts: np.ndarray) -> np.ndarray:
    """Payoff matrices for an array of rounds, shape (len(ts), n, m)."""
    if isinstance(schedule, PeriodicSchedule):
        stack = np.stack(schedule.matrices)
        return stack[(ts - 1) % schedule.period]
    if isinstance(schedule, PerturbedSchedule):
        g = schedule.factors(ts)
        return schedule.stable + g[:, None, None] * schedule.base
    k = len(schedule.matrices)
    out = np.broadcast_to(schedule.tail, (len(ts),) + schedule.tail.shape).copy()
    listed = ts <= k
    if listed.any():
        stack = np.stack(schedule.matrices + (schedule.tail,))
        out[listed] = stack[ts[listed] - 1]
    return out


def _matrix_batch(cfg: DynamicsConfig, schedule: PayoffSchedule, ts: np.ndarray) -> np.ndarray:
    """Iterative matrices for an array of rounds (simulation convention)."""
    n, m = schedule.shape
    a_t = _payoff_batch(schedule, ts)
    a_tt = a_t.transpose(0, 2, 1)
    c = len(ts)
    eye_n, eye_m = np.eye(n), np.eye(m)
    if cfg.method == EG:
        a, g = cfg.alpha, cfg.gamma
        mats = np.zeros((c, n + m, n + m))
        mats[:, :n, :n] = eye_n - a * g * (a_t @ a_tt)
        mats[:, :n, n:] = -a * a_t
        mats[:, n:, :n] = a * a_tt
        mats[:, n:, n:] = eye_m - g * a * (a_tt @ a_t)
        return mats
    d = n + m
    mats = np.zeros((c, 2 * d, 2 * d))
    if cfg.method == OGDA:
        a_prev = _payoff_batch(schedule, np.maximum(ts - 1, 1))
        e = cfg.eta
        mats[:, :n, :n] = eye_n
        mats[:, :n, n:d] = -2 * e * a_t
        mats[:, :n, d + n :] = e * a_prev
        mats[:, n:d, :n] = 2 * e * a_tt
        mats[:, n:d, n:d] = eye_m
        mats[:, n:d, d : d + n] = -e * a_prev.transpose(0, 2, 1)
    else:
        a_next_t = _payoff_batch(schedule, ts + 1).transpose(0, 2, 1)
        e, b1, b2 = cfg.eta, cfg.beta1, cfg.beta2
        mats[:, :n, :n] = (1 + b1) * eye_n
        mats[:, :n, n:d] = -e * a_t
        mats[:, :n, d : d + n] = -b1 * eye_n
        mats[:, n:d, :n] = e * (1 + b1) * a_next_t
        mats[:, n:d, n:d] = (1 + b2) * eye_m - e**2 * (a_next_t @ a_t)
        mats[:, n:d, d : d + n] = -e * b1 * a_next_t
        mats[:, n:d, d + n :] = -b2 * eye_m
    mats[:, d : d + n, :n] = eye_n
    mats[:, d + n :, n:d] = eye_m
    return mats


def simulate(
    cfg: DynamicsConfig,
    schedule: PayoffSchedule,
    init: JointState,
    rounds: int,
    path: str = DIRECT,
    measures=None,
) -> Trajectory:
    """Run the dynamics for up to ``rounds`` rounds.

    Both paths produce the same trajectory up to floating-point
    round-off; identical inputs always produce bitwise-identical
    output for a given path.
    """
    if not 1 <= rounds <= 10**7:
        raise ValueError("rounds must be in 1..1e7")
    if path not in (DIRECT, MATRIX):
        raise ValueError(f"unknown path {path!r}")
    cfg = cfg.resolved(schedule)
    n, m = _check_dims(schedule, init)
    if not (np.isfinite(init.x).all() and np.isfinite(init.y).all()):
        raise ValueError("initial state must be finite")
    pairs = resolve_measures(schedule, measures)

    xs = np.empty((rounds, n))
    ys = np.empty((rounds, m))
    norms = np.empty(rounds)
    dvals = {mid: np.empty(rounds) for mid, _ in pairs}
    status, at_round, done = COMPLETED, None, 0

    if path == DIRECT:
        state = init
        for t in range(1, rounds + 1):
            state = step_direct(cfg, schedule, state, t)
            xs[t - 1], ys[t - 1] = state.x, state.y
            row = _delta_row(pairs, state.x, state.y)
            for (mid, _), v in zip(pairs, row):
                dvals[mid][t - 1] = v
            norms[t - 1] = state.joint_norm()
            done = t
            if norms[t - 1] > DIVERGENCE_GUARD or not np.isfinite(norms[t - 1]):
                status, at_round = DIVERGED, t
                break
            if row and 0.0 < max(row) < UNDERFLOW_GUARD:
                status, at_round = UNDERFLOW, t
                break
    else:
        z = init.stacked(cfg.method)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            for start in range(0, rounds, _CHUNK):
                stop = min(start + _CHUNK, rounds)
                ts = np.arange(start + 1, stop + 1)
                mats = _matrix_batch(cfg, schedule, ts)
                zc = np.empty((stop - start, z.shape[0]))
                for i in range(stop - start):
                    z = mats[i] @ z
                    zc[i] = z
                xc, yc = zc[:, :n], zc[:, n : n + m]
                nc = np.sqrt(np.einsum("ij,ij->i", zc[:, : n + m], zc[:, : n + m]))
                rows = np.empty((len(pairs), stop - start))
                for j, (_, a) in enumerate(pairs):
                    rows[j] = np.linalg.norm(xc @ a, axis=1) + np.linalg.norm(
                        yc @ a.T, axis=1
                    )
                cut = stop - start
                bad = ~np.isfinite(nc) | (nc > DIVERGENCE_GUARD)
                if pairs:
                    peak = rows.max(axis=0)
                    tiny = (peak > 0.0) & (peak < UNDERFLOW_GUARD)
                else:
                    tiny = np.zeros(stop - start, dtype=bool)
                trigger = bad | tiny
                if trigger.any():
                    cut = int(np.argmax(trigger)) + 1
                    at_round = start + cut
                    status = DIVERGED if bad[cut - 1] else UNDERFLOW
                xs[start : start + cut] = xc[:cut]
                ys[start : start + cut] = yc[:cut]
                norms[start : start + cut] = nc[:cut]
                for j, (mid, _) in enumerate(pairs):
                    dvals[mid][start : start + cut] = rows[j, :cut]
                done = start + cut
                if status != COMPLETED:
                    break

    return Trajectory(
        init=init,
        xs=xs[:done],
        ys=ys[:done],
        deltas={mid: v[:done] for mid, v in dvals.items()},
        joint_norms=norms[:done],
        status=status,
        at_round=at_round,
    )
