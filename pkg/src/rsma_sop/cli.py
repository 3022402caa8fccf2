"""Command line front end.

::

    rsma-sop analytic --config fig2b --set tx_power_dbm=20
    rsma-sop compare --scenario III --trials 1000000 --seed 3
    rsma-sop sweep --config fig2a --out fig2a.csv
    rsma-sop noma-compare --config fig7b

``--config`` takes a run file or a preset name (see ``rsma-sop presets``).
Output is CSV on stdout or ``--out``.  The exit status is 1 when any row is an
error row or a flagged analytic/MC disagreement (or the RSMA <= NOMA check
fails), 2 on bad arguments, 0 otherwise.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from . import presets
from .config import RunConfig, parse_mapping, parse_values
from .errors import DomainError
from .model import Scenario, SystemConfig
from .quadrature import QuadratureSpec
from .sweep import (
    Mode,
    SweepSpec,
    TauRule,
    columns_for,
    has_problems,
    noma_baseline,
    run_sweep,
    simplex_grid,
    to_csv,
)

DEFAULT_TRIALS = 1_000_000
DEFAULT_SEED = 1


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="run file or preset name")
    p.add_argument("--scenario", choices=[s.value for s in Scenario], help="override the scenario (caption counts)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--trials", type=int, help=f"Monte Carlo trials (default {DEFAULT_TRIALS})")
    p.add_argument("--seed", type=int, help=f"Monte Carlo seed (default {DEFAULT_SEED})")
    p.add_argument("--quad-order", type=int, help="set all quadrature orders")
    p.add_argument("--workers", type=int, help="worker processes (default: available CPUs)")
    p.add_argument("--out", help="CSV output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsma-sop", description="Secrecy outage probability of mmWave RSMA links.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("analytic", "closed-form SOP at one point"),
        ("mc", "Monte Carlo SOP at one point"),
        ("compare", "closed form and Monte Carlo at one point"),
    ):
        _add_common(sub.add_parser(name, help=text))
    sw = sub.add_parser("sweep", help="one- or two-parameter sweep")
    _add_common(sw)
    sw.add_argument("--mode", choices=[m.value for m in Mode], help="evaluator (default analytic)")
    sw.add_argument("--axis-1", metavar="NAME=VALUES", help="e.g. tx_power_dbm=-10:40:5")
    sw.add_argument("--axis-2", metavar="NAME=VALUES", help="optional second axis")
    sw.add_argument("--tau-rule", choices=[r.value for r in TauRule])
    nc = sub.add_parser("noma-compare", help="RSMA simplex minimum vs the NOMA (tau_2 = 0) slice")
    _add_common(nc)
    nc.add_argument("--mode", choices=[m.value for m in Mode], help="evaluator (default compare)")
    nc.add_argument("--tau-step", type=float, help="simplex lattice step (default 0.05)")
    sub.add_parser("presets", help="list shipped presets")
    return parser


def _split_assignment(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise DomainError(f"expected KEY=VALUE, got {text!r}")
    return key.strip(), value.strip()


def load_run(args) -> RunConfig:
    if args.config:
        run = presets.resolve(args.config)
    else:
        if not args.scenario:
            raise DomainError("give --config or --scenario")
        run = RunConfig(SystemConfig(), presets.CAPTION_EVES[Scenario(args.scenario)], QuadratureSpec())
    if args.set:
        items = {f.name: getattr(run.system, f.name) for f in dataclasses.fields(SystemConfig)}
        items.update({k: getattr(run.eve, k) for k in ("l_ec", "l_e1", "l_e2")})
        items.update({f.name: getattr(run.quad, f.name) for f in dataclasses.fields(QuadratureSpec)})
        items.update(run.sweep)
        items["scenario"] = run.eve.scenario.value
        items.update(_split_assignment(s) for s in args.set)
        run = parse_mapping(items, run.source)
    if args.scenario and Scenario(args.scenario) is not run.eve.scenario:
        run = dataclasses.replace(run, eve=presets.CAPTION_EVES[Scenario(args.scenario)])
    if args.quad_order:
        run = dataclasses.replace(run, quad=QuadratureSpec.uniform(args.quad_order))
    return run


def _trials_seed(args, run: RunConfig):
    trials = args.trials if args.trials is not None else int(float(run.sweep.get("trials", DEFAULT_TRIALS)))
    seed = args.seed if args.seed is not None else int(run.sweep.get("seed", DEFAULT_SEED))
    return trials, seed


def _axis(text: str | None):
    if not text:
        return None
    name, values = _split_assignment(text)
    return name, tuple(parse_values(values))


def sweep_spec(args, run: RunConfig, mode: Mode) -> SweepSpec:
    trials, seed = _trials_seed(args, run)
    cfg = run.sweep
    axis_1 = _axis(args.axis_1) if getattr(args, "axis_1", None) else None
    if axis_1 is None:
        if "axis_1" not in cfg:
            raise DomainError("no sweep axis: set axis_1 in the config or pass --axis-1")
        axis_1 = (cfg["axis_1"], tuple(parse_values(cfg["axis_1_values"])))
    axis_2 = _axis(args.axis_2) if getattr(args, "axis_2", None) else None
    if axis_2 is None and not getattr(args, "axis_1", None) and cfg.get("axis_2"):
        axis_2 = (cfg["axis_2"], tuple(parse_values(cfg["axis_2_values"])))
    tau_rule = getattr(args, "tau_rule", None) or cfg.get("tau_rule", TauRule.NONE.value)
    return SweepSpec(axis_1, axis_2, mode, trials, seed, run.quad, TauRule(tau_rule))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_point(args, run: RunConfig) -> int:
    trials, seed = _trials_seed(args, run)
    mode = Mode(args.command)
    point = SweepSpec(("tx_power_dbm", (run.system.tx_power_dbm,)), mode=mode, n_trials=trials, seed=seed, quad=run.quad)
    rows = run_sweep(point, run.system, run.eve, workers=1)
    _emit(to_csv(rows, columns_for(point)[1:]), args.out)
    return 1 if has_problems(rows) else 0


def cmd_sweep(args, run: RunConfig) -> int:
    mode = Mode(args.mode or run.sweep.get("mode", Mode.ANALYTIC.value))
    spec = sweep_spec(args, run, mode)
    rows = run_sweep(spec, run.system, run.eve, workers=args.workers)
    _emit(to_csv(rows, columns_for(spec)), args.out)
    return 1 if has_problems(rows) else 0


def cmd_noma(args, run: RunConfig) -> int:
    trials, seed = _trials_seed(args, run)
    mode = Mode(args.mode or Mode.COMPARE.value)
    step = args.tau_step if args.tau_step is not None else float(run.sweep.get("tau_step", 0.05))
    points = int(round(1.0 / step)) + 1
    if abs((points - 1) * step - 1.0) > 1e-9:
        raise DomainError(f"tau step {step} does not divide 1")
    res = noma_baseline(run.system, run.eve, simplex_grid(points), mode, trials, seed, run.quad, args.workers)
    key = "sop_mc" if mode is Mode.MC else "sop_analytic"
    _emit(to_csv(res.rows, ["tau_c", "tau_1", "tau_2", key] + (["std_err"] if mode is Mode.MC else [])), args.out)
    summary = (
        f"min_sop_rsma={res.min_sop_rsma:.8e} at tau={res.argmin_rsma} "
        f"min_sop_noma={res.min_sop_noma:.8e} at tau={res.argmin_noma} "
        f"tolerance={res.tolerance:.3e} holds={res.holds}"
    )
    if res.min_sop_noma_tau1 is not None:
        summary += f" min_sop_tau1_zero={res.min_sop_noma_tau1:.8e}"
    print(summary, file=sys.stderr)
    return 0 if res.holds else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "presets":
        print("\n".join(presets.names()))
        return 0
    try:
        run = load_run(args)
        if args.command == "sweep":
            return cmd_sweep(args, run)
        if args.command == "noma-compare":
            return cmd_noma(args, run)
        return cmd_point(args, run)
    except (DomainError, KeyError) as exc:
        print(f"rsma-sop: error: {exc}", file=sys.stderr)
        return 2


__all__ = ["build_parser", "main"]
