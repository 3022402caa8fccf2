"""Flat ``key = value`` run files.

Every :class:`SystemConfig` field, the eavesdropper fields (``scenario``,
``l_ec``, ``l_e1``, ``l_e2``), the quadrature orders (``order_I`` ...
``order_D`` or ``quad_order`` for all five) and the sweep keys are accepted;
anything else is rejected.  Lines starting with ``#`` or ``;`` are comments.

Eavesdropper counts may be given as expressions in ``L``, ``Lc``, ``Lp``,
``l_ec`` and ``l_e1`` (e.g. ``l_e2 = L - l_ec - l_e1``) so that the caption
rules of a figure keep holding when a sweep changes the path counts.

Sweep keys::

    axis_1 = tx_power_dbm           # any SystemConfig / EveLayout field
    axis_1_values = -10:40:5        # start:stop:step (inclusive) or a comma list
    axis_2 = r_1                    # optional second axis
    axis_2_values = 15, 30
    tau_rule = none                 # none | split | remainder (see sweep.TauRule)
    mode = analytic                 # analytic | mc | compare
    trials = 1000000
    seed = 1
    tau_step = 0.05                 # simplex resolution for noma-compare
"""

from __future__ import annotations

import ast
import configparser
import dataclasses
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DomainError
from .model import EveLayout, Scenario, SystemConfig
from .quadrature import QuadratureSpec

SYSTEM_KEYS = tuple(f.name for f in dataclasses.fields(SystemConfig))
EVE_COUNT_KEYS = ("l_ec", "l_e1", "l_e2")
QUAD_KEYS = tuple(f.name for f in dataclasses.fields(QuadratureSpec))
SWEEP_KEYS = (
    "axis_1",
    "axis_1_values",
    "axis_2",
    "axis_2_values",
    "tau_rule",
    "mode",
    "trials",
    "seed",
    "tau_step",
)
INT_FIELDS = ("n_antennas", "n_paths", "n_common_paths")
_SECTION = "run"

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.FloorDiv: operator.floordiv}


def eval_count(expr, names: dict) -> int:
    """Evaluate an integer count expression over ``names`` (+, -, *, // only)."""
    if isinstance(expr, int):
        return expr

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name) and node.id in names:
            return names[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise DomainError(f"unsupported count expression {expr!r}")

    try:
        tree = ast.parse(str(expr).strip(), mode="eval")
    except SyntaxError:
        raise DomainError(f"cannot parse count expression {expr!r}") from None
    return int(ev(tree))


@dataclass(frozen=True)
class EveSpec:
    """Eavesdropper counts, possibly symbolic in the path counts."""

    scenario: Scenario
    l_ec: object = 0
    l_e1: object = 0
    l_e2: object = 0

    def resolve(self, cfg: SystemConfig) -> EveLayout:
        names = {"L": cfg.n_paths, "Lc": cfg.n_common_paths, "Lp": cfg.n_private_paths}
        names["l_ec"] = ec = eval_count(self.l_ec, names)
        names["l_e1"] = e1 = eval_count(self.l_e1, names)
        e2 = eval_count(self.l_e2, names)
        return EveLayout(self.scenario, ec, e1, e2)

    @classmethod
    def from_layout(cls, eve: EveLayout) -> "EveSpec":
        return cls(eve.scenario, eve.l_ec, eve.l_e1, eve.l_e2)


@dataclass
class RunConfig:
    system: SystemConfig
    eve: EveSpec
    quad: QuadratureSpec
    sweep: dict = field(default_factory=dict)
    source: str = ""

    def eve_layout(self, cfg: SystemConfig | None = None) -> EveLayout:
        return self.eve.resolve(cfg or self.system)


def _parse_number(key: str, text: str):
    try:
        value = float(text)
    except ValueError:
        raise DomainError(f"{key}: expected a number, got {text!r}") from None
    if key in INT_FIELDS:
        if value != int(value):
            raise DomainError(f"{key}: expected an integer, got {text!r}")
        return int(value)
    return value


def _parse_count(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return text


def parse_values(text: str) -> list:
    """``start:stop:step`` (inclusive of stop) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] == 0:
            raise DomainError(f"range must be start:stop:step with step != 0, got {text!r}")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise DomainError(f"empty range {text!r}")
        # round to the step's decimals so 0.1-type steps do not accumulate drift
        decimals = max(0, -math.floor(math.log10(abs(step))) + 6)
        return [round(start + i * step, decimals) for i in range(count)]
    values = [v.strip() for v in text.split(",") if v.strip()]
    if not values:
        raise DomainError("empty value list")
    out = []
    for v in values:
        try:
            out.append(int(v))
        except ValueError:
            try:
                out.append(float(v))
            except ValueError:
                out.append(v)
    return out


def parse_mapping(items: dict, source: str = "") -> RunConfig:
    unknown = sorted(set(items) - set(SYSTEM_KEYS) - {"scenario", *EVE_COUNT_KEYS} - set(QUAD_KEYS) - {"quad_order"} - set(SWEEP_KEYS))
    if unknown:
        raise DomainError(f"unknown keys: {', '.join(unknown)}")
    system = {k: _parse_number(k, str(items[k])) for k in SYSTEM_KEYS if k in items}
    if "scenario" not in items:
        raise DomainError("missing key: scenario")
    eve = EveSpec(
        Scenario.parse(items["scenario"]),
        *(_parse_count(str(items.get(k, "0"))) for k in EVE_COUNT_KEYS),
    )
    quad = {}
    if "quad_order" in items:
        quad = dict.fromkeys(QUAD_KEYS, int(items["quad_order"]))
    for k in QUAD_KEYS:
        if k in items:
            quad[k] = int(items[k])
    sweep = {k: str(items[k]).strip() for k in SWEEP_KEYS if k in items}
    return RunConfig(SystemConfig(**system), eve, QuadratureSpec(**quad), sweep, source)


def loads(text: str, source: str = "<string>") -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str  # keys are case sensitive (order_I)
    parser.read_string(f"[{_SECTION}]\n" + text, source=source)
    return parse_mapping(dict(parser[_SECTION]), source)


def load(path) -> RunConfig:
    path = Path(path)
    return loads(path.read_text(), source=str(path))


def dumps(run: RunConfig) -> str:
    """Inverse of :func:`loads` (sweep keys included)."""
    lines = [f"scenario = {run.eve.scenario.value}"]
    lines += [f"{k} = {getattr(run.eve, k)}" for k in EVE_COUNT_KEYS]
    lines += [f"{k} = {getattr(run.system, k)!r}" for k in SYSTEM_KEYS]
    lines += [f"{k} = {getattr(run.quad, k)}" for k in QUAD_KEYS]
    lines += [f"{k} = {v}" for k, v in run.sweep.items()]
    return "\n".join(lines) + "\n"
