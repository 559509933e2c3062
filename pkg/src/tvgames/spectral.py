"""Spectral analysis of the learning dynamics.

The asymptotic behavior of a periodic run is governed by the product of
the round matrices over one period: its eigenvalues are the Floquet
multipliers, their per-period log-moduli the Floquet exponents, and the
largest modulus away from 1 the contraction (or growth) rate. This
module computes those objects, the quartic Schur stability test, the
closed-form eigenvalue families of the constant-payoff matrices, and the
eigenvector initializations that realize the worst-case growth on the
alternating two-periodic example game.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import EG, NM, OGDA, DynamicsConfig, JointState, iterative_matrix
from .errors import NonSquareError, SolverFailureError, WrongScheduleKindError
from .linalg import Spectrum, as_matrix, eigenvalues, quartic_roots, svd, two_norm
from .schedules import PayoffSchedule, PeriodicSchedule, PerturbedSchedule

#: Eigenvalues within this absolute band of 1 count as "equal to 1".
UNIT_BAND = 1e-8

#: Singular values below this threshold span numeric kernels.
KERNEL_TOL = 1e-8

NORMALITY_REL_TOL = 1e-12


@dataclass(frozen=True)
class SpectralReport:
    """Spectrum of a period product plus its stability diagnostics."""

    matrix_dim: int
    spectrum: Spectrum
    lambda_star: float
    unit_eigen_count: int
    floquet_exponents: np.ndarray
    is_normal: bool
    normality_defect: float
    diag_residual: float


@dataclass(frozen=True)
class QuarticVerdict:
    """Outcome of the coefficient-based unit-disk test for a real quartic.

    ``margin`` is 1 minus the largest root modulus (positive when all
    roots are strictly inside the unit circle). ``conditions`` holds the
    three inequality outcomes, or None when |d - 1| < 1e-12 makes the
    third inequality inapplicable and the verdict falls back to the
    root moduli directly.
    """

    stable: bool
    margin: float
    conditions: tuple[bool, bool, bool] | None


@dataclass(frozen=True)
class KernelReport:
    """Comparison of ker(P - I) against the per-round common kernel."""

    principal_angle: float
    product_kernel_dim: int
    intersection_dim: int
    per_round_dims: tuple[int, ...]
    product_rank: int
    passed: bool


def period_product(cfg: DynamicsConfig, schedule: PeriodicSchedule) -> np.ndarray:
    """Product A_T ... A_1 of the round matrices over one period.

    Round indices wrap periodically, so the optimistic method's A_0 is
    the last matrix of the period and the momentum method's look-ahead
    at t = T is the first one.
    """
    if not isinstance(schedule, PeriodicSchedule):
        raise WrongScheduleKindError("period product needs a periodic schedule")
    cfg = cfg.resolved(schedule)
    prod = None
    for t in range(1, schedule.period + 1):
        mat = iterative_matrix(cfg, schedule, t, periodic_wrap=True)
        prod = mat if prod is None else mat @ prod
    return prod


def analyze_product(p, period: int) -> SpectralReport:
    """Spectral report for a period product (or any square matrix)."""
    mat = as_matrix(p)
    dim = mat.shape[0]
    if mat.shape[0] != mat.shape[1]:
        raise NonSquareError(f"expected square matrix, got {mat.shape}")
    if period < 1:
        raise ValueError("period must be >= 1")
    spec = eigenvalues(mat)
    mods = np.abs(spec.eigenvalues)
    unit = np.abs(spec.eigenvalues - 1.0) < UNIT_BAND
    lambda_star = float(mods[~unit].max()) if (~unit).any() else 0.0
    with np.errstate(divide="ignore"):
        floquet = np.where(mods > 0.0, np.log(np.maximum(mods, 1e-320)), -np.inf) / period
    defect = two_norm(mat @ mat.T - mat.T @ mat)
    scale = two_norm(mat)
    is_normal = defect <= NORMALITY_REL_TOL * max(scale**2, 1e-300)
    diag_residual = _diag_residual(mat, scale)
    return SpectralReport(
        matrix_dim=dim,
        spectrum=spec,
        lambda_star=lambda_star,
        unit_eigen_count=int(unit.sum()),
        floquet_exponents=floquet,
        is_normal=is_normal,
        normality_defect=defect,
        diag_residual=diag_residual,
    )


def _diag_residual(mat: np.ndarray, scale: float) -> float:
    """||P D P^-1 - mat|| / ||mat||, +inf when the eigenbasis is singular."""
    vals, vecs = np.linalg.eig(mat)
    try:
        recon = (vecs * vals) @ np.linalg.inv(vecs)
    except np.linalg.LinAlgError:
        return math.inf
    resid = two_norm(recon.real - mat) if np.isfinite(recon).all() else math.inf
    if not math.isfinite(resid):
        return math.inf
    return resid / max(scale, 1e-300)


def rank_at(mat, tol: float = KERNEL_TOL) -> int:
    """Numeric rank: number of singular values above ``tol``."""
    _, s, _ = svd(mat)
    return int((s > tol).sum())


def schur_quartic_test(a: float, b: float, c: float, d: float) -> QuarticVerdict:
    """Unit-disk test for x^4 + a x^3 + b x^2 + c x + d.

    All four roots lie strictly inside the unit disk iff

        |c - a d| < 1 - d^2,
        |a + c| < b + d + 1,
        b < (1 + d) + (c - a d)(a - c) / (d - 1)^2.

    The third condition degenerates at d = 1; within 1e-12 of that the
    verdict comes from the companion-matrix root moduli instead.
    """
    roots = quartic_roots(a, b, c, d)
    max_mod = float(np.abs(roots).max())
    margin = 1.0 - max_mod
    if abs(d - 1.0) < 1e-12:
        return QuarticVerdict(stable=max_mod < 1.0, margin=margin, conditions=None)
    cond1 = abs(c - a * d) < 1.0 - d * d
    cond2 = abs(a + c) < b + d + 1.0
    cond3 = b < (1.0 + d) + (c - a * d) * (a - c) / (d - 1.0) ** 2
    return QuarticVerdict(
        stable=cond1 and cond2 and cond3,
        margin=margin,
        conditions=(cond1, cond2, cond3),
    )


@dataclass(frozen=True)
class FamilyRoots:
    """Eigenvalue family contributed by one singular value of the payoff."""

    sigma: float
    roots: np.ndarray


def static_eigen_family(method: str, a, cfg: DynamicsConfig) -> list[FamilyRoots]:
    """Closed-form eigenvalue families of the constant-payoff round matrix.

    For each singular value sigma of the payoff (zeros included), the
    family polynomial is

        eg:   (x - 1)^2 + 2 g a s^2 (x - 1) + a^2 s^2 + a^2 g^2 s^4
        ogda: x^2 (x - 1)^2 + e^2 s^2 (1 - 2x)^2
        nm:   (x - 1)^2 (x - b1)(x - b2) + e^2 s^2 x^3
    """
    mat = as_matrix(a, "payoff")
    from .schedules import ExplicitSchedule

    cfg = cfg.resolved(ExplicitSchedule(matrices=(), tail=mat))
    _, sigmas, _ = svd(mat)
    out = []
    for s in sigmas:
        s = float(s)
        if method == EG:
            # (x-1) = -g*a*s^2 +- i*a*s exactly (the discriminant is -(a*s)^2)
            re = 1.0 - cfg.gamma * cfg.alpha * s**2
            im = cfg.alpha * s
            roots = np.array([complex(re, -im), complex(re, im)])
        elif method == OGDA:
            e2s2 = cfg.eta**2 * s**2
            roots = quartic_roots(-2.0, 1.0 + 4.0 * e2s2, -4.0 * e2s2, e2s2)
        elif method == NM:
            b1, b2 = cfg.beta1, cfg.beta2
            roots = quartic_roots(
                -(b1 + b2 + 2.0) + cfg.eta**2 * s**2,
                b1 * b2 + 2.0 * (b1 + b2) + 1.0,
                -2.0 * b1 * b2 - (b1 + b2),
                b1 * b2,
            )
        else:
            raise ValueError(f"unknown method {method!r}")
        out.append(FamilyRoots(sigma=s, roots=roots))
    return out


def step_size_threshold(method: str, payoff, periodic: bool = False) -> float:
    """Largest admissible step size for the given payoff context.

    Accepts a payoff matrix or a schedule. The optimistic method needs
    steps below 1/(2 sigma); the momentum method below 1/sigma; the
    extra-gradient method below 1/sigma in periodic games (sigma then
    ranges over the whole period) and 1/(2 sigma) in perturbed ones.
    Returns +inf for an all-zero payoff.
    """
    if isinstance(payoff, PeriodicSchedule):
        sigma = max(two_norm(m) for m in payoff.matrices)
        periodic = True
    elif isinstance(payoff, PerturbedSchedule):
        sigma = two_norm(payoff.stable)
    else:
        sigma = two_norm(as_matrix(payoff, "payoff"))
    if sigma == 0.0:
        return math.inf
    if method == OGDA:
        return 1.0 / (2.0 * sigma)
    if method == NM:
        return 1.0 / sigma
    if method == EG:
        return 1.0 / sigma if periodic else 1.0 / (2.0 * sigma)
    raise ValueError(f"unknown method {method!r}")


def ogda_period2_rate(eta: float) -> float:
    """Top eigenvalue of the optimistic two-period product, in closed form.

    lambda' = 4 eta^2 + sqrt(64 eta^4 + 8 eta^2 + 1) / 2 + 1/2; the
    per-round growth rate of the dynamics is sqrt(lambda').
    """
    if not eta > 0:
        raise ValueError("eta must be > 0")
    return 4.0 * eta**2 + 0.5 * math.sqrt(64.0 * eta**4 + 8.0 * eta**2 + 1.0) + 0.5


def nm_period2_charpoly(
    eta: float, beta1: float, beta2: float
) -> tuple[tuple[float, float, float, float], tuple[float, float]]:
    """Characteristic polynomial of the momentum two-period product.

    Returns the quartic coefficients (a, b, c, d) and the two fixed
    roots (1, beta2^2) that complete the degree-6 spectrum. For every
    eta > 0 the quartic violates the second unit-disk inequality by
    exactly 4 eta^4, so the product always has a root outside the disk.
    """
    if not eta > 0:
        raise ValueError("eta must be > 0")
    b1sq, b2sq = beta1**2, beta2**2
    a = -(4.0 * eta**4 + 4.0 * eta**2 * (beta2 - beta1) + b1sq + b2sq + 2.0)
    b = 4.0 * eta**2 * (beta2 - beta1) + b1sq * b2sq + 2.0 * b1sq + 2.0 * b2sq + 1.0
    c = -(2.0 * b1sq * b2sq + b1sq + b2sq)
    d = b1sq * b2sq
    return (a, b, c, d), (1.0, b2sq)


def divergent_init(
    method: str, cfg: DynamicsConfig, schedule: PeriodicSchedule
) -> JointState:
    """Eigenvector initialization realizing the top growth rate.

    Takes the eigenvector of the period product for its largest-modulus
    eigenvalue outside the excluded set ({1, beta2^2} for the momentum
    method, {0, 1} for the optimistic one), unpacked into a joint
    state; a complex eigenvalue contributes v + conj(v).
    """
    if not isinstance(schedule, PeriodicSchedule) or schedule.period != 2:
        raise WrongScheduleKindError("divergent init is defined on period-2 games")
    cfg = cfg.resolved(schedule)
    if cfg.method != method:
        raise ValueError(f"config is for {cfg.method!r}, not {method!r}")
    prod = period_product(cfg, schedule)
    vals, vecs = np.linalg.eig(prod)
    excluded = np.abs(vals - 1.0) < UNIT_BAND
    if method == NM:
        excluded |= np.abs(vals - cfg.beta2**2) < UNIT_BAND
    elif method == OGDA:
        excluded |= np.abs(vals) < UNIT_BAND
    if excluded.all():
        raise SolverFailureError("every eigenvalue fell in the excluded set")
    allowed = np.flatnonzero(~excluded)
    pick = allowed[int(np.argmax(np.abs(vals[allowed])))]
    vec = vecs[:, pick]
    x0 = vec + np.conj(vec) if abs(vals[pick].imag) > 0 else vec
    x0 = np.real(x0)
    if np.linalg.norm(x0) < 1e-12 * np.linalg.norm(vec):
        raise SolverFailureError("real part of the chosen eigenvector vanished")
    n, m = schedule.shape
    if method == EG:
        return JointState.make(x0[:n], x0[n : n + m])
    return JointState.make(
        x0[:n], x0[n : n + m], x0[n + m : 2 * n + m], x0[2 * n + m :]
    )


def _null_basis(mat: np.ndarray, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal basis of the numeric null space (columns)."""
    _, s, v = svd(mat)
    # singular values sort descending, so trailing right vectors span the
    # kernel; columns beyond len(s) exist when mat has more cols than rows
    small = int((s <= tol).sum()) + (v.shape[1] - s.size)
    return v[:, v.shape[1] - small :] if small else v[:, :0]


def kernel_intersection_check(
    cfg: DynamicsConfig, schedule: PeriodicSchedule
) -> KernelReport:
    """Numerically verify ker(P - I) = the common fixed space of the rounds.

    P is the extra-gradient period product; the common space is the
    null space of the stacked per-round matrices A_i - I. The report
    carries the largest principal angle between the two subspaces, the
    numeric rank of P - I, and a pass flag (angle below 1e-6 with
    matching dimensions).
    """
    cfg = cfg.resolved(schedule)
    if cfg.method != EG:
        raise WrongScheduleKindError("kernel check is for the extra-gradient method")
    prod = period_product(cfg, schedule)
    dim = prod.shape[0]
    eye = np.eye(dim)
    prod_kernel = _null_basis(prod - eye)
    per_round = [
        iterative_matrix(cfg, schedule, t, periodic_wrap=True) - eye
        for t in range(1, schedule.period + 1)
    ]
    per_dims = tuple(int(_null_basis(m).shape[1]) for m in per_round)
    inter_kernel = _null_basis(np.vstack(per_round))
    dp, di = prod_kernel.shape[1], inter_kernel.shape[1]
    if dp != di:
        angle = math.pi / 2
    elif dp == 0:
        angle = 0.0
    else:
        cosines = np.linalg.svd(prod_kernel.T @ inter_kernel, compute_uv=False)
        angle = float(np.arccos(np.clip(cosines.min(), -1.0, 1.0)))
    return KernelReport(
        principal_angle=angle,
        product_kernel_dim=dp,
        intersection_dim=di,
        per_round_dims=per_dims,
        product_rank=rank_at(prod - eye),
        passed=(dp == di) and angle < 1e-6,
    )
