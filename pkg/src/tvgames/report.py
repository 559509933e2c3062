"""CSV emission and parsing for trajectories, spectra, and sweeps.

Floats are written with 17 significant digits so every value round-trips
bit-exactly through the files.
"""
from __future__ import annotations

import csv

import numpy as np

from .dynamics import Trajectory
from .spectral import SpectralReport

_F = "%.17g"


def _fmt(v: float) -> str:
    return _F % v


def sample_rounds(total: int, stride: int) -> np.ndarray:
    """Rounds written to CSV: every ``stride``-th plus the final one."""
    ts = np.arange(stride, total + 1, stride)
    if len(ts) == 0 or ts[-1] != total:
        ts = np.append(ts, total)
    return ts


def write_trajectory_csv(path: str, traj: Trajectory, stride: int = 1) -> None:
    """Rows ``t, <measures...>, norm_x, norm_y, status`` at the given stride."""
    measures = list(traj.deltas)
    ts = sample_rounds(traj.rounds_completed, stride)
    norm_x = np.linalg.norm(traj.xs, axis=1)
    norm_y = np.linalg.norm(traj.ys, axis=1)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *measures, "norm_x", "norm_y", "status"])
        for t in ts:
            i = t - 1
            w.writerow(
                [
                    str(int(t)),
                    *(_fmt(traj.deltas[m][i]) for m in measures),
                    _fmt(norm_x[i]),
                    _fmt(norm_y[i]),
                    traj.status,
                ]
            )


def read_trajectory_csv(path: str) -> dict[str, np.ndarray]:
    """Parse a trajectory CSV back into arrays keyed by column name."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    out: dict[str, np.ndarray] = {}
    for j, name in enumerate(header):
        col = [row[j] for row in rows]
        if name == "status":
            out[name] = np.array(col)
        elif name == "t":
            out[name] = np.array([int(v) for v in col])
        else:
            out[name] = np.array([float(v) for v in col])
    return out


def write_spectral_csv(
    path: str,
    report: SpectralReport,
    families=None,
    thresholds: dict[str, float] | None = None,
) -> None:
    """Flat record/context/re/im/value rows for a spectral report.

    ``families`` is an optional list of (context, FamilyRoots) pairs;
    ``thresholds`` maps method names to admissible step bounds.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["record", "context", "re", "im", "value"])
        for lam in report.spectrum.eigenvalues:
            w.writerow(["eigenvalue", "", _fmt(lam.real), _fmt(lam.imag), _fmt(abs(lam))])
        for e in report.floquet_exponents:
            w.writerow(["floquet_exponent", "", "", "", _fmt(e)])
        w.writerow(["lambda_star", "", "", "", _fmt(report.lambda_star)])
        w.writerow(["unit_eigen_count", "", "", "", str(report.unit_eigen_count)])
        w.writerow(["matrix_dim", "", "", "", str(report.matrix_dim)])
        w.writerow(["normality_defect", "", "", "", _fmt(report.normality_defect)])
        w.writerow(["is_normal", "", "", "", str(report.is_normal).lower()])
        w.writerow(["diag_residual", "", "", "", _fmt(report.diag_residual)])
        w.writerow(["eig_residual_bound", "", "", "", _fmt(report.spectrum.residual_bound)])
        for context, fam in families or []:
            for r in fam.roots:
                w.writerow(
                    ["family_root", context, _fmt(r.real), _fmt(r.imag), _fmt(fam.sigma)]
                )
        for method, bound in (thresholds or {}).items():
            w.writerow(["step_threshold", method, "", "", _fmt(bound)])


def write_sweep_csv(path: str, param_names: list[str], rows: list[dict]) -> None:
    """One row per sweep cell, in grid order."""
    header = [
        *param_names,
        "status",
        "fitted_rate",
        "theoretical_rate",
        "relative_gap",
        "r_squared",
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            out = []
            for key in header:
                v = row.get(key)
                if v is None:
                    out.append("")
                elif isinstance(v, float):
                    out.append(_fmt(v))
                else:
                    out.append(str(v))
            w.writerow(out)
