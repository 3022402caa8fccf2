"""Shipped run files for the figure families and the caption eavesdropper rules.

Preset names are the file stems under ``rsma_sop/configs``: ``fig2a`` ...
``fig2d`` (P sweep, r_1 in {15, 30}), ``fig3*`` (P sweep, L_c in {3, 6}),
``re_sweep_*`` (P sweep, r_e in {20, 25, 30}), ``fig4*`` (tau_c sweep, P in
{0, 10, 20} dBm), ``fig5*`` (tau_c sweep, rate thresholds) and ``fig7*``
(tau simplex for the NOMA comparison).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .config import EveSpec, RunConfig, load, loads
from .model import Scenario

# eavesdropper counts used by every figure caption, per scenario
CAPTION_EVES = {
    Scenario.I: EveSpec(Scenario.I, 0, 2, 0),
    Scenario.II: EveSpec(Scenario.II, 2, "Lp", 0),
    Scenario.III: EveSpec(Scenario.III, "Lc", 1, "L - l_ec - l_e1"),
    Scenario.IV: EveSpec(Scenario.IV, 2, 0, "L - l_ec"),
}


def _root():
    return resources.files(__package__) / "configs"


def names() -> list[str]:
    return sorted(p.name[:-4] for p in _root().iterdir() if p.name.endswith(".ini"))


def load_preset(name: str) -> RunConfig:
    entry = _root() / f"{name}.ini"
    if not entry.is_file():
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(names())}")
    return loads(entry.read_text(), source=f"preset:{name}")


def resolve(ref: str) -> RunConfig:
    """Load ``ref`` as a file path if it exists, else as a preset name."""
    path = Path(ref)
    if path.is_file():
        return load(path)
    return load_preset(ref)
