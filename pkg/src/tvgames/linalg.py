"""Dense real linear algebra kernel.

Everything downstream (trajectory engines, Floquet products, stability
tests) calls through these few routines so that accuracy targets and
ordering conventions are fixed in exactly one place:

* eigenvalues are returned sorted by (real, imag) so reports are
  reproducible run to run,
* every eigenpair is checked against a 1e-8 relative residual,
* quartic roots come from the 4x4 companion matrix, never a formula.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLargeError, NonSquareError, SolverFailureError

#: Dense solves only; biggest matrix in scope is a small block matrix.
MAX_DIM = 512

#: Relative eigenpair residual target.
EIG_TOL = 1e-8


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a finite float64 2-D array."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} contains non-finite entries")
    return m


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a real matrix with a solver quality certificate.

    Attributes
    ----------
    eigenvalues:
        All n eigenvalues with multiplicity, sorted by (real, imag).
    max_modulus:
        max |lambda|.
    residual_bound:
        Worst observed ||m v - lambda v||_2 over unit eigenvectors,
        guaranteed <= EIG_TOL * ||m||_2.
    """

    eigenvalues: np.ndarray
    max_modulus: float
    residual_bound: float


def eigenvalues(m) -> Spectrum:
    """All eigenvalues of a square matrix, residual-checked.

    Raises
    ------
    NonSquareError, DimensionTooLargeError, SolverFailureError
    """
    a = as_matrix(m)
    n, k = a.shape
    if n != k:
        raise NonSquareError(f"expected square matrix, got {a.shape}")
    if n > MAX_DIM:
        raise DimensionTooLargeError(f"dimension {n} exceeds cap {MAX_DIM}")
    try:
        vals, vecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise SolverFailureError(str(exc)) from exc
    # eig returns unit columns; measure the worst eigenpair residual.
    resid = np.linalg.norm(a @ vecs - vecs * vals[np.newaxis, :], axis=0)
    worst = float(resid.max())
    scale = two_norm(a)
    if worst > EIG_TOL * max(scale, 1e-300):
        raise SolverFailureError(
            f"eigenpair residual {worst:.3e} exceeds {EIG_TOL:.0e} * ||m||"
        )
    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    return Spectrum(
        eigenvalues=vals,
        max_modulus=float(np.abs(vals).max()),
        residual_bound=worst,
    )


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full SVD ``m = U @ diag(s) @ V.T`` with s sorted descending.

    Returns (U, s, V); U is n x n, V is m x m, both orthonormal.
    """
    a = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise SolverFailureError(str(exc)) from exc
    return u, s, vh.T


def two_norm(m) -> float:
    """Largest singular value (spectral norm)."""
    a = as_matrix(m)
    try:
        s = np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SolverFailureError(str(exc)) from exc
    return float(s[0])


def quartic_roots(a: float, b: float, c: float, d: float) -> np.ndarray:
    """Roots of the monic quartic x^4 + a x^3 + b x^2 + c x + d.

    Computed as the eigenvalues of the 4x4 companion matrix, then
    verified via |p(root)| <= 1e-8 * (1 + max coefficient magnitude).
    """
    coeffs = (float(a), float(b), float(c), float(d))
    if not all(np.isfinite(coeffs)):
        raise ValueError("quartic coefficients must be finite")
    comp = np.zeros((4, 4))
    comp[1, 0] = comp[2, 1] = comp[3, 2] = 1.0
    comp[:, 3] = [-d, -c, -b, -a]
    roots = eigenvalues(comp).eigenvalues
    scale = 1.0 + max(abs(v) for v in coeffs)
    vals = np.abs(((roots + a) * roots + b) * roots**2 + c * roots + d)
    if vals.max() > 1e-8 * scale:
        raise SolverFailureError(f"quartic residual {vals.max():.3e} too large")
    return roots
