"""Secrecy outage probability of a two-user mmWave RSMA downlink.

Closed-form evaluators (:func:`sop`), a Monte Carlo oracle
(:func:`estimate_sop`), parameter sweeps and the NOMA baseline.
"""

from .analytic import SecrecyResult, sop
from .config import EveSpec, RunConfig
from .errors import (
    ConvergenceError,
    DomainError,
    ScenarioMismatch,
    UnsupportedParameters,
)
from .model import EveLayout, LinkBudget, Scenario, SystemConfig, derive_link_budget
from .montecarlo import McEstimate, estimate_sop, estimate_sop_fullvector
from .quadrature import QuadratureSpec
from .sweep import Mode, SweepSpec, TauRule, noma_baseline, run_sweep

__all__ = [
    "ConvergenceError",
    "DomainError",
    "EveLayout",
    "EveSpec",
    "LinkBudget",
    "McEstimate",
    "Mode",
    "QuadratureSpec",
    "RunConfig",
    "Scenario",
    "ScenarioMismatch",
    "SecrecyResult",
    "SweepSpec",
    "SystemConfig",
    "TauRule",
    "UnsupportedParameters",
    "derive_link_budget",
    "estimate_sop",
    "estimate_sop_fullvector",
    "noma_baseline",
    "run_sweep",
    "sop",
]

__version__ = "0.1.0"
