"""Command-line entry point.

Subcommands::

    tvgames run     --preset fig2-pe [--rounds N] [--out DIR] [--svg] [--spectral]
    tvgames run     --config experiment.json
    tvgames sweep   --preset fig1-ogda --grid eta=0.01,0.05,0.1
    tvgames analyze --preset fig2-pe
    tvgames presets

Exit codes: 0 on a completed run, 2 when the divergence guard tripped
(expected for the divergence presets), 1 on any error. The default
output directory is $TVGAMES_OUT, falling back to the working directory.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import presets, report, spectral, svg
from .config import (
    ExperimentConfig,
    build_dynamics,
    build_init,
    build_schedule,
    load_config,
    with_overrides,
)
from .dynamics import COMPLETED, DIVERGED, simulate
from .errors import TvgamesError
from .metrics import fit_rate
from .schedules import ExplicitSchedule, PeriodicSchedule

OUT_ENV = "TVGAMES_OUT"


def _load(args) -> tuple[str, ExperimentConfig]:
    if bool(args.preset) == bool(args.config):
        raise TvgamesError("give exactly one of --preset or --config")
    if args.preset:
        name, cfg = args.preset, presets.expand(args.preset)
    else:
        name = os.path.splitext(os.path.basename(args.config))[0]
        cfg = load_config(args.config)
    cfg = with_overrides(cfg, rounds=args.rounds, seed=args.seed)
    return name, cfg


def _outdir(args) -> str:
    out = args.out or os.environ.get(OUT_ENV) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _run_config(cfg: ExperimentConfig):
    schedule = build_schedule(cfg.schedule)
    dcfg = build_dynamics(cfg.dynamics).resolved(schedule)
    init = build_init(cfg.init, schedule, dcfg, cfg.seed)
    traj = simulate(
        dcfg, schedule, init, cfg.rounds, path=cfg.path, measures=cfg.measures
    )
    return schedule, dcfg, traj


def _stable_report(dcfg, schedule) -> spectral.SpectralReport:
    """Spectral report: period product for periodic games, else the
    constant-payoff round matrix of the stable game."""
    if isinstance(schedule, PeriodicSchedule):
        prod = spectral.period_product(dcfg, schedule)
        return spectral.analyze_product(prod, schedule.period)
    from .schedules import stable_matrix

    const = ExplicitSchedule(matrices=(), tail=stable_matrix(schedule))
    from .dynamics import iterative_matrix

    return spectral.analyze_product(iterative_matrix(dcfg, const, 1), 1)


def cmd_run(args) -> int:
    name, cfg = _load(args)
    out = _outdir(args)
    schedule, dcfg, traj = _run_config(cfg)
    stride = cfg.csv_stride
    traj_path = os.path.join(out, f"{name}-trajectory.csv")
    report.write_trajectory_csv(traj_path, traj, stride)
    print(f"wrote {traj_path}")
    if args.spectral:
        spec_path = os.path.join(out, f"{name}-spectral.csv")
        rep = _stable_report(dcfg, schedule)
        report.write_spectral_csv(spec_path, rep)
        print(f"wrote {spec_path}")
    if args.svg:
        ts = report.sample_rounds(traj.rounds_completed, stride)
        series = {m: (ts, traj.deltas[m][ts - 1]) for m in traj.deltas}
        svg_path = os.path.join(out, f"{name}-delta.svg")
        svg.write_line_chart(svg_path, series, title=name, y_label="log10 delta")
        print(f"wrote {svg_path}")
    last = {m: traj.deltas[m][-1] for m in traj.deltas}
    print(
        f"status={traj.status}"
        + (f" at_round={traj.at_round}" if traj.at_round else "")
        + f" rounds={traj.rounds_completed}"
    )
    print("final " + "  ".join(f"{m}={v:.6g}" for m, v in last.items()))
    try:
        stride_fit = schedule.period if isinstance(schedule, PeriodicSchedule) else 1
        fit = fit_rate(traj, next(iter(traj.deltas)), stride=stride_fit)
        print(
            f"fitted log-rate per round: {fit.log_rate_per_round:.6g} "
            f"(r^2 = {fit.r_squared:.4f}, window {fit.window[0]}..{fit.window[1]})"
        )
    except TvgamesError as exc:
        print(f"rate fit unavailable: {exc}")
    return 2 if traj.status == DIVERGED else 0


def _verdict(rep: spectral.SpectralReport) -> str:
    radius = rep.spectrum.max_modulus
    if rep.unit_eigen_count == rep.matrix_dim:
        return "neutral: every Floquet multiplier sits at one"
    if radius > 1.0 + 1e-9:
        return f"diverges: spectral radius {radius:.10g} exceeds one"
    return (
        "converges: all Floquet exponents of non-unit multipliers are negative "
        f"(lambda* = {rep.lambda_star:.10g})"
    )


def cmd_analyze(args) -> int:
    name, cfg = _load(args)
    out = _outdir(args)
    schedule = build_schedule(cfg.schedule)
    dcfg = build_dynamics(cfg.dynamics).resolved(schedule)
    rep = _stable_report(dcfg, schedule)
    if isinstance(schedule, PeriodicSchedule):
        payoffs = [(f"A_{i}", m) for i, m in enumerate(schedule.matrices, start=1)]
    else:
        from .schedules import stable_matrix

        payoffs = [("stable", stable_matrix(schedule))]
    families = [
        (ctx, fam)
        for ctx, mat in payoffs
        for fam in spectral.static_eigen_family(dcfg.method, mat, dcfg)
    ]
    thresholds = {
        method: spectral.step_size_threshold(method, schedule)
        if isinstance(schedule, PeriodicSchedule)
        else spectral.step_size_threshold(method, payoffs[0][1])
        for method in ("eg", "ogda", "nm")
    }
    spec_path = os.path.join(out, f"{name}-spectral.csv")
    report.write_spectral_csv(spec_path, rep, families=families, thresholds=thresholds)
    print(f"wrote {spec_path}")
    print(
        f"dim={rep.matrix_dim} radius={rep.spectrum.max_modulus:.10g} "
        f"lambda*={rep.lambda_star:.10g} unit_count={rep.unit_eigen_count} "
        f"normal={rep.is_normal}"
    )
    print(_verdict(rep))
    return 0


_SWEEP_DYNAMICS = ("eta", "alpha", "gamma", "beta1", "beta2", "step")


def _apply_cell(cfg: ExperimentConfig, assignment: dict[str, float]) -> ExperimentConfig:
    dyn = dict(cfg.dynamics)
    sched = dict(cfg.schedule)
    for key, value in assignment.items():
        if key == "step":
            if dyn.get("method") == "eg":
                dyn["alpha"] = dyn["gamma"] = value
            else:
                dyn["eta"] = value
        elif key in _SWEEP_DYNAMICS:
            dyn[key] = value
        elif key == "exponent":
            sched["exponent"] = value
        else:
            raise TvgamesError(f"unknown sweep parameter {key!r}")
    return with_overrides(cfg, dynamics=dyn, schedule=sched)


def _theoretical_rate(cfg: ExperimentConfig) -> float | None:
    """Per-round log rate predicted by the period-product spectrum."""
    schedule = build_schedule(cfg.schedule)
    if not isinstance(schedule, PeriodicSchedule):
        return None
    dcfg = build_dynamics(cfg.dynamics).resolved(schedule)
    rep = spectral.analyze_product(
        spectral.period_product(dcfg, schedule), schedule.period
    )
    radius = rep.spectrum.max_modulus
    if radius > 1.0 + spectral.UNIT_BAND:
        return math.log(radius) / schedule.period
    if rep.lambda_star > 0.0:
        return math.log(rep.lambda_star) / schedule.period
    return None


def _sweep_cell(cfg: ExperimentConfig, assignment: dict[str, float]) -> dict:
    cell_cfg = _apply_cell(cfg, assignment)
    row: dict = {k: v for k, v in assignment.items()}
    try:
        schedule, _, traj = _run_config(cell_cfg)
        row["status"] = traj.status
        stride = schedule.period if isinstance(schedule, PeriodicSchedule) else 1
        fit = fit_rate(traj, next(iter(traj.deltas)), stride=stride)
        row["fitted_rate"] = fit.log_rate_per_round
        row["r_squared"] = fit.r_squared
        theo = _theoretical_rate(cell_cfg)
        if theo is not None:
            row["theoretical_rate"] = theo
            denom = max(abs(theo), 1e-300)
            row["relative_gap"] = abs(fit.log_rate_per_round - theo) / denom
    except TvgamesError as exc:
        row.setdefault("status", f"error: {exc}")
    return row


def cmd_sweep(args) -> int:
    name, cfg = _load(args)
    out = _outdir(args)
    grids = []
    for spec in args.grid:
        if "=" not in spec:
            raise TvgamesError(f"--grid expects name=v1,v2,..., got {spec!r}")
        pname, _, values = spec.partition("=")
        vals = [float(v) for v in values.split(",") if v != ""]
        grids.append((pname.strip(), vals))
    if len(grids) > 2:
        raise TvgamesError("sweep supports at most two grid parameters")
    cells: list[dict[str, float]] = []
    if len(grids) == 1:
        cells = [{grids[0][0]: v} for v in grids[0][1]]
    elif len(grids) == 2:
        cells = [
            {grids[0][0]: v0, grids[1][0]: v1}
            for v0 in grids[0][1]
            for v1 in grids[1][1]
        ]
    if len(cells) > 10**4:
        raise TvgamesError(f"grid has {len(cells)} cells, cap is 10^4")
    with ThreadPoolExecutor(max_workers=min(4, max(1, len(cells)))) as pool:
        rows = list(pool.map(lambda a: _sweep_cell(cfg, a), cells))
    sweep_path = os.path.join(out, f"{name}-sweep.csv")
    report.write_sweep_csv(sweep_path, [g[0] for g in grids], rows)
    print(f"wrote {sweep_path} ({len(rows)} cells)")
    return 0


def cmd_presets(_args) -> int:
    for pid in presets.preset_ids():
        cfg = presets.expand(pid)
        print(f"{pid}")
        print(f"    rounds={cfg.rounds} method={cfg.dynamics.get('method')}")
        for line in _wrap(presets.describe(pid), 72):
            print(f"    {line}")
    return 0


def _wrap(text: str, width: int) -> list[str]:
    words, lines, cur = text.split(), [], ""
    for w in words:
        if cur and len(cur) + 1 + len(w) > width:
            lines.append(cur)
            cur = w
        else:
            cur = f"{cur} {w}".strip()
    if cur:
        lines.append(cur)
    return lines


def _add_common(p: argparse.ArgumentParser, needs_grid: bool = False) -> None:
    p.add_argument("--preset", help="named preset id (see `tvgames presets`)")
    p.add_argument("--config", help="path to a JSON experiment config")
    p.add_argument("--rounds", type=int, help="override the round count")
    p.add_argument("--seed", type=int, help="override the seed")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    if needs_grid:
        p.add_argument(
            "--grid",
            action="append",
            default=[],
            required=True,
            help="parameter grid, e.g. --grid eta=0.01,0.05 (max two)",
        )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tvgames",
        description="Learning dynamics on time-varying bilinear zero-sum games",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="simulate one configuration")
    _add_common(p_run)
    p_run.add_argument("--svg", action="store_true", help="emit a log-scale chart")
    p_run.add_argument(
        "--spectral", action="store_true", help="also emit the spectral report CSV"
    )
    p_run.set_defaults(fn=cmd_run)
    p_sweep = sub.add_parser("sweep", help="run a parameter grid")
    _add_common(p_sweep, needs_grid=True)
    p_sweep.set_defaults(fn=cmd_sweep)
    p_an = sub.add_parser("analyze", help="spectral report without simulating")
    _add_common(p_an)
    p_an.set_defaults(fn=cmd_analyze)
    p_ls = sub.add_parser("presets", help="list the named presets")
    p_ls.set_defaults(fn=cmd_presets)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except TvgamesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
