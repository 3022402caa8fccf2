"""Closed-form secrecy connection/outage probabilities for the four scenarios."""

from __future__ import annotations

from ..model import EveLayout, LinkBudget, Scenario, SystemConfig, derive_link_budget
from ..quadrature import QuadratureSpec
from ._common import SecrecyResult
from .checks import TermCheck, run_term_checks
from .scenario_1 import scp_scenario_1
from .scenario_2 import scp_scenario_2
from .scenario_3 import scp_scenario_3
from .scenario_4 import scp_scenario_4

_EVALUATORS = {
    Scenario.I: scp_scenario_1,
    Scenario.II: scp_scenario_2,
    Scenario.III: scp_scenario_3,
    Scenario.IV: scp_scenario_4,
}


def sop(
    cfg: SystemConfig,
    eve: EveLayout,
    quad: QuadratureSpec | None = None,
    budget: LinkBudget | None = None,
    check_terms: bool = False,
) -> SecrecyResult:
    """Secrecy outage probability of U1 for the eavesdropper layout ``eve``.

    With ``check_terms`` every term family is also evaluated from its integral
    form; disagreements beyond 1e-6 are logged, listed under
    ``term_diagnostics["term_checks"]`` and flagged ``term_disagreement``.
    """
    budget = budget or derive_link_budget(cfg)
    result = _EVALUATORS[eve.scenario](cfg, eve, budget, quad or QuadratureSpec())
    if check_terms and "degenerate" not in result.term_diagnostics:
        checks = run_term_checks(cfg, eve, budget)
        result.term_diagnostics["term_checks"] = [c.as_dict() for c in checks]
        if any(not c.rel_err <= 1e-6 for c in checks):
            result.flags = result.flags + ("term_disagreement",)
    return result


__all__ = [
    "SecrecyResult",
    "TermCheck",
    "run_term_checks",
    "scp_scenario_1",
    "scp_scenario_2",
    "scp_scenario_3",
    "scp_scenario_4",
    "sop",
]
