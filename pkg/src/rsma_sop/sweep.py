"""Parameter sweeps, CSV output and the NOMA baseline.

Rows come out in axis-major order (axis 1 outer, axis 2 inner) whatever order
the worker pool finishes them in.  Every grid point uses the same Monte Carlo
seed, i.e. common random numbers across the grid, which keeps MC curves smooth
and makes the output a function of (config, seed, trials) only.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .analytic import sop as analytic_sop
from .config import EVE_COUNT_KEYS, INT_FIELDS, SYSTEM_KEYS, EveSpec
from .errors import DomainError
from .model import TAU_SLACK, EveLayout, Scenario, SystemConfig
from .montecarlo import estimate_sop
from .quadrature import QuadratureSpec

FLAG_SE = 3.0
FLAG_ABS = 5e-3
MIN_AXIS_POINTS = 10


class Mode(str, enum.Enum):
    ANALYTIC = "analytic"
    MC = "mc"
    COMPARE = "compare"


class TauRule(str, enum.Enum):
    """How the power split is completed when one tau is swept.

    ``split``: tau_1 = tau_2 = (1 - tau_c)/2.  ``remainder``: tau_c = 1 - tau_1 - tau_2.
    """

    NONE = "none"
    SPLIT = "split"
    REMAINDER = "remainder"


SWEEPABLE = SYSTEM_KEYS + EVE_COUNT_KEYS
TAU_KEYS = ("tau_c", "tau_1", "tau_2")


def _coerce(name: str, value):
    """Axis values take the type of the swept field (counts int, the rest float)."""
    try:
        if name in INT_FIELDS or name in EVE_COUNT_KEYS:
            as_float = float(value)
            return int(as_float) if as_float == int(as_float) else as_float
        return float(value)
    except (TypeError, ValueError):
        raise DomainError(f"axis {name!r}: non-numeric value {value!r}") from None


@dataclass(frozen=True)
class SweepSpec:
    axis_1: tuple
    axis_2: tuple | None = None
    mode: Mode = Mode.ANALYTIC
    n_trials: int = 1_000_000
    seed: int = 1
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    tau_rule: TauRule = TauRule.NONE

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "tau_rule", TauRule(self.tau_rule))
        for attr in ("axis_1", "axis_2"):
            axis = getattr(self, attr)
            if axis is None:
                continue
            name, values = axis
            if name not in SWEEPABLE:
                raise DomainError(f"cannot sweep {name!r}; choose one of {', '.join(SWEEPABLE)}")
            if len(values) == 0:
                raise DomainError(f"axis {name!r} has no values")
            object.__setattr__(self, attr, (name, tuple(_coerce(name, v) for v in values)))
        if self.axis_2 is not None and self.axis_2[0] == self.axis_1[0]:
            raise DomainError("the two axes must differ")
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise DomainError("n_trials must be a positive integer")

    @property
    def axes(self) -> tuple:
        return (self.axis_1,) if self.axis_2 is None else (self.axis_1, self.axis_2)

    @property
    def names(self) -> tuple:
        return tuple(name for name, _ in self.axes)

    def grid(self):
        return list(itertools.product(*(values for _, values in self.axes)))


def apply_point(base_cfg: SystemConfig, base_eve: EveSpec, names, values, tau_rule: TauRule):
    """Config and eavesdropper layout at one grid point (may raise)."""
    sys_updates = {n: v for n, v in zip(names, values) if n in SYSTEM_KEYS}
    eve_updates = {n: v for n, v in zip(names, values) if n in EVE_COUNT_KEYS}
    if tau_rule is TauRule.SPLIT:
        tau_c = sys_updates.get("tau_c", base_cfg.tau_c)
        sys_updates["tau_1"] = sys_updates["tau_2"] = (1.0 - tau_c) / 2.0
    elif tau_rule is TauRule.REMAINDER:
        t1 = sys_updates.get("tau_1", base_cfg.tau_1)
        t2 = sys_updates.get("tau_2", base_cfg.tau_2)
        rest = 1.0 - t1 - t2
        sys_updates["tau_c"] = 0.0 if -TAU_SLACK <= rest < 0.0 else rest
    cfg = dataclasses.replace(base_cfg, **sys_updates)
    eve = dataclasses.replace(base_eve, **{k: int(v) for k, v in eve_updates.items()}).resolve(cfg)
    eve.validate(cfg)
    return cfg, eve


def check_tau_grid(spec: SweepSpec, base_cfg: SystemConfig, base_eve: EveSpec) -> None:
    """Reject tau sweeps whose grid leaves the power-split simplex anywhere."""
    if not any(n in TAU_KEYS for n in spec.names) and spec.tau_rule is TauRule.NONE:
        return
    for values in spec.grid():
        taus = {k: getattr(base_cfg, k) for k in TAU_KEYS}
        taus.update({n: v for n, v in zip(spec.names, values) if n in TAU_KEYS})
        if spec.tau_rule is TauRule.SPLIT:
            taus["tau_1"] = taus["tau_2"] = (1.0 - taus["tau_c"]) / 2.0
        elif spec.tau_rule is TauRule.REMAINDER:
            taus["tau_c"] = 1.0 - taus["tau_1"] - taus["tau_2"]
        if any(not -TAU_SLACK <= t <= 1.0 + TAU_SLACK for t in taus.values()) or sum(taus.values()) > 1.0 + TAU_SLACK:
            raise DomainError(f"tau grid point {dict(zip(spec.names, values))} leaves the power-split simplex")


def columns_for(spec: SweepSpec) -> list:
    cols = list(spec.names)
    if spec.mode is Mode.ANALYTIC:
        cols += ["sop_analytic", "converged"]
    elif spec.mode is Mode.MC:
        cols += ["sop_mc", "std_err", "n_trials"]
    else:
        cols += ["sop_analytic", "sop_mc", "std_err", "converged", "flagged"]
    return cols + ["error"]


def disagrees(analytic: float, mc: float, se: float) -> bool:
    return abs(analytic - mc) > FLAG_SE * se + FLAG_ABS


def evaluate(cfg: SystemConfig, eve: EveLayout, mode: Mode, quad: QuadratureSpec, n_trials: int, seed: int) -> dict:
    """Columns of one row for an already validated point."""
    row = {}
    if mode in (Mode.ANALYTIC, Mode.COMPARE):
        res = analytic_sop(cfg, eve, quad)
        row["sop_analytic"] = res.sop
        row["converged"] = res.converged
    if mode in (Mode.MC, Mode.COMPARE):
        est = estimate_sop(cfg, eve, n_trials, seed)
        row["sop_mc"] = est.sop_hat
        row["std_err"] = est.std_err
        if mode is Mode.MC:
            row["n_trials"] = est.n_trials
    if mode is Mode.COMPARE:
        row["flagged"] = disagrees(row["sop_analytic"], row["sop_mc"], row["std_err"])
    return row


def _point_task(task) -> dict:
    spec, base_cfg, base_eve, values = task
    row = dict(zip(spec.names, values))
    try:
        cfg, eve = apply_point(base_cfg, base_eve, spec.names, values, spec.tau_rule)
        row.update(evaluate(cfg, eve, spec.mode, spec.quad, spec.n_trials, spec.seed))
        row["error"] = ""
    except (ValueError, ArithmeticError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def default_workers(n_tasks: int) -> int:
    try:
        cpus = len(os.sched_getaffinity(0))
    except AttributeError:
        cpus = os.cpu_count() or 1
    return max(1, min(cpus, n_tasks))


def map_points(tasks, workers: int | None):
    workers = default_workers(len(tasks)) if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        return [_point_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, independent of completion order
        return list(pool.map(_point_task, tasks))


def run_sweep(spec: SweepSpec, base_cfg: SystemConfig, base_eve, workers: int | None = None) -> list:
    """One row dict per grid point, axis-major; invalid points become error rows."""
    if isinstance(base_eve, EveLayout):
        base_eve = EveSpec.from_layout(base_eve)
    check_tau_grid(spec, base_cfg, base_eve)
    tasks = [(spec, base_cfg, base_eve, values) for values in spec.grid()]
    return map_points(tasks, workers)


# CSV ----------------------------------------------------------------------------


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.8e}"
    return str(value)


def to_csv(rows: list, columns: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def has_problems(rows: list) -> bool:
    return any(row.get("error") or row.get("flagged") for row in rows)


# NOMA baseline -------------------------------------------------------------------


def simplex_grid(points_per_axis: int) -> list:
    """All ``(tau_c, tau_1, tau_2)`` on the step ``1/(points_per_axis - 1)`` lattice."""
    n = points_per_axis - 1
    if n < 1:
        raise DomainError("points_per_axis must be at least 2")
    grid = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            t1, t2 = i / n, j / n
            grid.append((round(1.0 - t1 - t2, 12), t1, t2))
    return grid


@dataclass
class NomaComparison:
    min_sop_rsma: float
    min_sop_noma: float
    argmin_rsma: tuple
    argmin_noma: tuple
    tolerance: float
    holds: bool
    min_sop_noma_tau1: float | None = None
    rows: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.min_sop_rsma, self.min_sop_noma))


def _check_resolution(tau_grid) -> None:
    t1_values = {round(t1, 12) for _, t1, _ in tau_grid}
    t2_values = {round(t2, 12) for _, _, t2 in tau_grid}
    if len(t1_values) < MIN_AXIS_POINTS or (len(t2_values) > 1 and len(t2_values) < MIN_AXIS_POINTS):
        raise DomainError(f"tau grid too coarse: need at least {MIN_AXIS_POINTS} points per axis")


def noma_baseline(
    base_cfg: SystemConfig,
    base_eve,
    tau_grid,
    mode: Mode = Mode.ANALYTIC,
    n_trials: int = 1_000_000,
    seed: int = 1,
    quad: QuadratureSpec | None = None,
    workers: int | None = None,
) -> NomaComparison:
    """Grid-minimum SOP over the tau simplex (RSMA) and over its tau_2 = 0 slice (NOMA).

    ``mode`` selects the evaluator for every grid point (``analytic`` or
    ``mc``); ``compare`` evaluates the grid analytically and re-estimates both
    minimizers by Monte Carlo, which is what ``holds`` is then judged on:
    ``min_rsma <= min_noma + 3 SE``.  For Scenario IV the tau_1 = 0 slice
    minimum is reported as well.
    """
    mode = Mode(mode)
    quad = quad or QuadratureSpec()
    if isinstance(base_eve, EveLayout):
        base_eve = EveSpec.from_layout(base_eve)
    tau_grid = [tuple(float(t) for t in point) for point in tau_grid]
    _check_resolution(tau_grid)
    names = TAU_KEYS
    grid_mode = Mode.MC if mode is Mode.MC else Mode.ANALYTIC
    task_spec = _PointSpec(names, grid_mode, quad, n_trials, seed)
    tasks = [(task_spec, base_cfg, base_eve, point) for point in tau_grid]
    rows = map_points(tasks, workers)
    bad = [r for r in rows if r["error"]]
    if bad:
        raise DomainError(f"{len(bad)} simplex points failed, first: {bad[0]['error']}")
    key = "sop_mc" if grid_mode is Mode.MC else "sop_analytic"

    def argmin(select):
        chosen = [r for r in rows if select(r)]
        if not chosen:
            raise DomainError("tau grid contains no point of the requested slice")
        best = min(chosen, key=lambda r: r[key])
        return best[key], tuple(best[n] for n in names), best

    min_rsma, arg_rsma, row_rsma = argmin(lambda r: True)
    min_noma, arg_noma, row_noma = argmin(lambda r: r["tau_2"] == 0.0)
    tau1_min = None
    if base_eve.scenario is Scenario.IV:
        tau1_min = argmin(lambda r: r["tau_1"] == 0.0)[0]
    if mode is Mode.ANALYTIC:
        tolerance = 0.0
        holds = min_rsma <= min_noma
    elif mode is Mode.MC:
        tolerance = FLAG_SE * row_noma["std_err"]
        holds = min_rsma <= min_noma + tolerance
    else:
        confirm = {}
        for label, point in (("rsma", arg_rsma), ("noma", arg_noma)):
            cfg, eve = apply_point(base_cfg, base_eve, names, point, TauRule.NONE)
            confirm[label] = estimate_sop(cfg, eve, n_trials, seed)
        tolerance = FLAG_SE * confirm["noma"].std_err
        holds = confirm["rsma"].sop_hat <= confirm["noma"].sop_hat + tolerance
        min_rsma, min_noma = confirm["rsma"].sop_hat, confirm["noma"].sop_hat
    return NomaComparison(min_rsma, min_noma, arg_rsma, arg_noma, tolerance, holds, tau1_min, rows)


@dataclass(frozen=True)
class _PointSpec:
    """The subset of :class:`SweepSpec` a point task needs (free-form axis names)."""

    names: tuple
    mode: Mode
    quad: QuadratureSpec
    n_trials: int
    seed: int
    tau_rule: TauRule = TauRule.NONE


__all__ = [
    "Mode",
    "NomaComparison",
    "SweepSpec",
    "TauRule",
    "columns_for",
    "has_problems",
    "noma_baseline",
    "run_sweep",
    "simplex_grid",
    "to_csv",
]
