"""Named experiment presets.

Each preset expands deterministically to a complete ExperimentConfig.
Where the source setups leave step sizes or initial points unstated,
the values chosen here are documented in the description; the
qualitative outcome (which methods converge, which diverge) does not
depend on them.
"""
from __future__ import annotations

from .config import ExperimentConfig

# The alternating two-periodic example game: a scalar x against y in the
# plane, payoff row [1, -1] on odd rounds and its negation on even ones.
_ALTERNATING_GAME = {"kind": "periodic", "matrices": [[[1.0, -1.0]], [[-1.0, 1.0]]]}

# Three-periodic game used for the convergence/divergence separation.
_PERIOD3_GAME = {
    "kind": "periodic",
    "matrices": [
        [[1.0, 2.0], [2.0, 4.0]],
        [[3.0, 7.0], [7.0, 1.0]],
        [[4.0, 2.0], [4.0, 2.0]],
    ],
}

_STABLE = [[2.0, 3.0], [4.0, 6.0]]
_BIG_PERTURBATION = [[-15.0, 70.0], [-90.0, 90.0]]
_SMALL_PERTURBATION = [[-10.0, 10.0], [-10.0, 10.0]]

_SUMMABLE_INIT = {
    "x": [15.0, 13.0],
    "y": [35.0, 1.0],
    "x_prev": [11.0, 3.0],
    "y_prev": [35.0, 1.0],
}


def _cfg(**kw) -> ExperimentConfig:
    return ExperimentConfig(**kw)


def _perturbed(base, decay, exponent) -> dict:
    return {
        "kind": "perturbed",
        "stable": _STABLE,
        "base": base,
        "decay": decay,
        "exponent": exponent,
    }


PRESETS: dict[str, tuple[str, ExperimentConfig]] = {
    "fig1-eg": (
        "Alternating game, extra-gradient with step 0.1 from a seeded random "
        "unit point: the distance measures contract geometrically.",
        _cfg(
            schedule=_ALTERNATING_GAME,
            dynamics={"method": "eg", "alpha": 0.1, "gamma": 0.1},
            init={"kind": "random-unit"},
            rounds=4000,
        ),
    ),
    "fig1-ogda": (
        "Alternating game, optimistic method with step 0.1 started on the top "
        "eigenvector of the two-round product: grows at the closed-form rate "
        "until the divergence guard trips (expect exit code 2).",
        _cfg(
            schedule=_ALTERNATING_GAME,
            dynamics={"method": "ogda", "eta": 0.1},
            init={"kind": "eigvec-top"},
            rounds=20000,
        ),
    ),
    "fig1-nm": (
        "Alternating game, negative momentum (eta 0.1, beta1 -1/2, beta2 0) "
        "from the top eigenvector: diverges exponentially (expect exit code 2).",
        _cfg(
            schedule=_ALTERNATING_GAME,
            dynamics={"method": "nm", "eta": 0.1, "beta1": -0.5, "beta2": 0.0},
            init={"kind": "eigvec-top"},
            rounds=30000,
        ),
    ),
    "fig2-pe": (
        "Three-periodic game, extra-gradient with step 0.01 from a seeded "
        "random unit point: every per-matrix distance measure falls below "
        "1e-6 within 1e5 rounds.",
        _cfg(
            schedule=_PERIOD3_GAME,
            dynamics={"method": "eg", "alpha": 0.01, "gamma": 0.01},
            init={"kind": "random-unit"},
            rounds=100000,
        ),
    ),
    "fig2-po": (
        "Three-periodic game, optimistic method with step 0.01: the distance "
        "measures grow until the divergence guard trips near round 5.1e5 "
        "(expect exit code 2).",
        _cfg(
            schedule=_PERIOD3_GAME,
            dynamics={"method": "ogda", "eta": 0.01},
            init={"kind": "random-unit"},
            rounds=700000,
        ),
    ),
    "fig3-eg": (
        "Summable perturbation (power 1.1) of the rank-one stable game, "
        "extra-gradient with step 0.005 and the published initial points.",
        _cfg(
            schedule=_perturbed(_BIG_PERTURBATION, "power", 1.1),
            dynamics={"method": "eg", "alpha": 0.005, "gamma": 0.005},
            init=dict(_SUMMABLE_INIT),
            rounds=100000,
        ),
    ),
    "fig3-ogda": (
        "Summable perturbation (power 1.1), optimistic method with step 0.005.",
        _cfg(
            schedule=_perturbed(_BIG_PERTURBATION, "power", 1.1),
            dynamics={"method": "ogda", "eta": 0.005},
            init=dict(_SUMMABLE_INIT),
            rounds=100000,
        ),
    ),
    "fig3-nm": (
        "Summable perturbation (power 1.1), negative momentum with step 0.005, "
        "beta1 -1/2, beta2 0.",
        _cfg(
            schedule=_perturbed(_BIG_PERTURBATION, "power", 1.1),
            dynamics={"method": "nm", "eta": 0.005, "beta1": -0.5, "beta2": 0.0},
            init=dict(_SUMMABLE_INIT),
            rounds=100000,
        ),
    ),
    "fig4-power": (
        "Non-summable power decay t^-0.4: extra-gradient still drives the "
        "stable-game distance to zero; the joint norm never increases once "
        "the step is below 1/sigma_t.",
        _cfg(
            schedule=_perturbed(_SMALL_PERTURBATION, "power", 0.4),
            dynamics={"method": "eg", "alpha": 0.005, "gamma": 0.005},
            init={"kind": "random-unit"},
            rounds=1000000,
        ),
    ),
    "fig4-log": (
        "Non-summable logarithmic decay log(t)^-1.3: extra-gradient converges "
        "with visible oscillation from the slowly dying perturbation.",
        _cfg(
            schedule=_perturbed(_SMALL_PERTURBATION, "log", 1.3),
            dynamics={"method": "eg", "alpha": 0.005, "gamma": 0.005},
            init={"kind": "random-unit"},
            rounds=1000000,
        ),
    ),
    "figG1": (
        "Non-summable power decay t^-0.4 run with the optimistic method: a "
        "case where it converges even though the accumulated perturbations "
        "are unbounded.",
        _cfg(
            schedule=_perturbed(_SMALL_PERTURBATION, "power", 0.4),
            dynamics={"method": "ogda", "eta": 0.005},
            init={"kind": "random-unit"},
            rounds=200000,
        ),
    ),
    "figG2": (
        "Rank-one stable game with an alternating t^-0.1 perturbation at step "
        "0.015: extra-gradient contracts, while the optimistic and momentum "
        "methods grow exponentially at a slow rate (about 1e-4 per round). "
        "The initial point is scaled to 1e140 so the guard at 1e150 trips "
        "within the demo horizon; rates are scale-free, so this changes "
        "nothing qualitative.",
        _cfg(
            schedule={
                "kind": "perturbed",
                "stable": [[1.0, 0.0], [0.0, 0.0]],
                "base": [[0.0, 8.0], [0.0, 0.0]],
                "decay": "alternating",
                "exponent": 0.1,
            },
            dynamics={"method": "eg", "alpha": 0.015, "gamma": 0.015},
            init={"kind": "random-unit", "scale": 1e140},
            rounds=250000,
        ),
    ),
    "thm33-nm-converging-init": (
        "Alternating game under negative momentum: initial points that avoid "
        "the expanding eigendirection converge, and they form a measure-zero "
        "subspace. The listed reference point is projected onto the "
        "non-expanding span of the two-round product before the run. The "
        "horizon stops before round-off noise (about 1e-15 of the state) "
        "re-seeds the expanding direction.",
        _cfg(
            schedule=_ALTERNATING_GAME,
            dynamics={"method": "nm", "eta": 0.1, "beta1": -0.5, "beta2": 0.0},
            init={
                "kind": "contracting-span",
                "x": [0.0],
                "y": [-0.4, 1.0],
                "x_prev": [0.0],
                "y_prev": [1.0, -1.0],
            },
            rounds=800,
        ),
    ),
}


def preset_ids() -> list[str]:
    return list(PRESETS)


def expand(preset_id: str) -> ExperimentConfig:
    """The full configuration a preset stands for (pure: same id, same bytes)."""
    if preset_id not in PRESETS:
        raise KeyError(f"unknown preset {preset_id!r}; known: {', '.join(PRESETS)}")
    return PRESETS[preset_id][1]


def describe(preset_id: str) -> str:
    if preset_id not in PRESETS:
        raise KeyError(f"unknown preset {preset_id!r}")
    return PRESETS[preset_id][0]
