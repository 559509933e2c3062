"""Experiment configuration: JSON schema, validation, and builders.

A config file is a single JSON object::

    {
      "schedule": {"kind": "periodic", "matrices": [[[1, -1]], [[-1, 1]]]},
      "dynamics": {"method": "ogda", "eta": 0.1},
      "init":     {"kind": "eigvec-top", "scale": 1.0},
      "rounds":   20000,
      "path":     "matrix",
      "seed":     0
    }

Schedule kinds: ``periodic`` (matrices), ``perturbed`` (stable, base,
decay in {power, log, alternating}, exponent), ``explicit`` (matrices,
tail). Dynamics fields default to the safe-step recipe when omitted.
Init is either explicit vectors {x, y, x_prev?, y_prev?} or a generated
kind: ``eigvec-top`` (top-growth eigenvector of the period product) or
``random-unit`` (seeded); both accept a ``scale`` factor.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import DIRECT, EG, MATRIX, METHODS, DynamicsConfig, JointState
from .errors import ConfigError
from .schedules import (
    DECAY_KINDS,
    ExplicitSchedule,
    PayoffSchedule,
    PeriodicSchedule,
    PerturbedSchedule,
)
from . import spectral


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete, deterministic description of one experiment run."""

    schedule: dict
    dynamics: dict
    init: dict
    rounds: int
    path: str = MATRIX
    measures: tuple[str, ...] | None = None
    seed: int = 0
    sample_stride: int | None = None

    def canonical_json(self) -> str:
        """Byte-stable serialization (sorted keys, no whitespace games)."""
        payload = {
            "schedule": self.schedule,
            "dynamics": self.dynamics,
            "init": self.init,
            "rounds": self.rounds,
            "path": self.path,
            "measures": list(self.measures) if self.measures is not None else None,
            "seed": self.seed,
            "sample_stride": self.sample_stride,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @property
    def csv_stride(self) -> int:
        """Row sampling stride for trajectory CSV output."""
        if self.sample_stride is not None:
            return max(1, int(self.sample_stride))
        return max(1, self.rounds // 10**4)


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"{where}: missing field {key!r}")
    return d[key]


def _matrix(v, where: str) -> np.ndarray:
    try:
        m = np.asarray(v, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: not a numeric matrix: {exc}") from exc
    if m.ndim != 2:
        raise ConfigError(f"{where}: expected a nested [[...]] matrix, got shape {m.shape}")
    return m


def build_schedule(spec: dict) -> PayoffSchedule:
    kind = _need(spec, "kind", "schedule")
    try:
        if kind == "periodic":
            mats = [_matrix(m, "schedule.matrices") for m in _need(spec, "matrices", "schedule")]
            return PeriodicSchedule(matrices=tuple(mats))
        if kind == "perturbed":
            decay = _need(spec, "decay", "schedule")
            if decay not in DECAY_KINDS:
                raise ConfigError(f"schedule.decay must be one of {DECAY_KINDS}, got {decay!r}")
            return PerturbedSchedule(
                stable=_matrix(_need(spec, "stable", "schedule"), "schedule.stable"),
                base=_matrix(_need(spec, "base", "schedule"), "schedule.base"),
                decay=decay,
                exponent=float(_need(spec, "exponent", "schedule")),
            )
        if kind == "explicit":
            mats = [_matrix(m, "schedule.matrices") for m in spec.get("matrices", [])]
            return ExplicitSchedule(
                matrices=tuple(mats),
                tail=_matrix(_need(spec, "tail", "schedule"), "schedule.tail"),
            )
    except ValueError as exc:
        raise ConfigError(f"schedule: {exc}") from exc
    raise ConfigError(f"schedule.kind must be periodic/perturbed/explicit, got {kind!r}")


def build_dynamics(spec: dict) -> DynamicsConfig:
    method = _need(spec, "method", "dynamics")
    if method not in METHODS:
        raise ConfigError(f"dynamics.method must be one of {METHODS}, got {method!r}")
    kwargs = {}
    for name in ("eta", "alpha", "gamma", "beta1", "beta2"):
        if spec.get(name) is not None:
            kwargs[name] = float(spec[name])
    try:
        return DynamicsConfig(method=method, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"dynamics: {exc}") from exc


def build_init(
    spec: dict, schedule: PayoffSchedule, dcfg: DynamicsConfig, seed: int
) -> JointState:
    n, m = schedule.shape
    kind = spec.get("kind")
    scale = float(spec.get("scale", 1.0))
    if kind is None:
        try:
            return JointState.make(
                np.asarray(_need(spec, "x", "init"), dtype=float) * scale,
                np.asarray(_need(spec, "y", "init"), dtype=float) * scale,
                None if spec.get("x_prev") is None else np.asarray(spec["x_prev"], dtype=float) * scale,
                None if spec.get("y_prev") is None else np.asarray(spec["y_prev"], dtype=float) * scale,
            )
        except Exception as exc:
            raise ConfigError(f"init: {exc}") from exc
    if kind == "random-unit":
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(n + m)
        v *= scale / np.linalg.norm(v)
        return JointState.make(v[:n], v[n:])
    if kind == "eigvec-top":
        state = spectral.divergent_init(dcfg.method, dcfg, schedule)
        norm = float(np.linalg.norm(state.stacked(dcfg.method)))
        factor = scale / norm if norm > 0 else scale
        return JointState.make(
            state.x * factor, state.y * factor,
            state.x_prev * factor, state.y_prev * factor,
        )
    if kind == "contracting-span":
        return _contracting_span_init(spec, schedule, dcfg)
    raise ConfigError(f"init.kind must be eigvec-top/random-unit/contracting-span, got {kind!r}")


def _contracting_span_init(
    spec: dict, schedule: PayoffSchedule, dcfg: DynamicsConfig
) -> JointState:
    """Reference point with its expanding eigencomponents removed.

    Decomposes the given point in the eigenbasis of the period product
    and zeroes every coefficient belonging to an eigenvalue of modulus
    above one; what remains evolves inside the non-expanding span.
    """
    if not isinstance(schedule, PeriodicSchedule):
        raise ConfigError("init.kind contracting-span needs a periodic schedule")
    ref = JointState.make(
        np.asarray(_need(spec, "x", "init"), dtype=float),
        np.asarray(_need(spec, "y", "init"), dtype=float),
        None if spec.get("x_prev") is None else np.asarray(spec["x_prev"], dtype=float),
        None if spec.get("y_prev") is None else np.asarray(spec["y_prev"], dtype=float),
    )
    dcfg = dcfg.resolved(schedule)
    prod = spectral.period_product(dcfg, schedule)
    vals, vecs = np.linalg.eig(prod)
    coeffs = np.linalg.solve(vecs, ref.stacked(dcfg.method).astype(complex))
    coeffs[np.abs(vals) > 1.0 + spectral.UNIT_BAND] = 0.0
    flat = np.real(vecs @ coeffs)
    n, m = schedule.shape
    if dcfg.method == EG:
        return JointState.make(flat[:n], flat[n:])
    return JointState.make(
        flat[:n], flat[n : n + m], flat[n + m : 2 * n + m], flat[2 * n + m :]
    )


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a decoded JSON object into an ExperimentConfig."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    rounds = _need(data, "rounds", "config")
    if not isinstance(rounds, int) or rounds < 1:
        raise ConfigError(f"rounds must be a positive integer, got {rounds!r}")
    path = data.get("path", MATRIX)
    if path not in (MATRIX, DIRECT):
        raise ConfigError(f"path must be 'matrix' or 'direct', got {path!r}")
    measures = data.get("measures")
    if measures is not None:
        measures = tuple(str(m) for m in measures)
    cfg = ExperimentConfig(
        schedule=dict(_need(data, "schedule", "config")),
        dynamics=dict(_need(data, "dynamics", "config")),
        init=dict(_need(data, "init", "config")),
        rounds=rounds,
        path=path,
        measures=measures,
        seed=int(data.get("seed", 0)),
        sample_stride=data.get("sample_stride"),
    )
    # fail fast on anything structurally wrong
    sched = build_schedule(cfg.schedule)
    build_dynamics(cfg.dynamics)
    return cfg


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_config(data)


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
