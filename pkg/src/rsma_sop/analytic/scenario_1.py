"""Scenario I: the eavesdropper overlaps only U1's private paths."""

from __future__ import annotations

import math

from ..errors import ScenarioMismatch
from ..model import EveLayout, LinkBudget, Scenario, SystemConfig
from ._common import SecrecyResult, SignedSum, finalize, lfact, xlogy, zero_result


def scp_closed_form(Lp: int, Le1: int, a1: float, a2: float) -> float:
    """``Pr{X_1p > A1 X_ep1 + A2}`` for gamma gains of shapes ``Lp`` and ``Le1``."""
    if Lp == 0 or math.isinf(a2):
        return 0.0
    acc = SignedSum()
    for t in range(Lp):
        for n in range(t + 1):
            log_term = (
                -a2
                + xlogy(n, a1)
                + xlogy(t - n, a2)
                + lfact(Le1 + n - 1)
                - lfact(n)
                - lfact(t - n)
                - lfact(Le1 - 1)
                - (Le1 + n) * math.log1p(a1)
            )
            acc.add(1.0, log_term)
    return acc.value()


def scp_scenario_1(cfg: SystemConfig, eve: EveLayout, budget: LinkBudget, quad=None) -> SecrecyResult:
    if eve.scenario is not Scenario.I:
        raise ScenarioMismatch(f"Scenario I evaluator called with Scenario {eve.scenario.value}")
    eve.validate(cfg)
    if budget.delta_1 == 0.0:
        return zero_result("no private power (delta_1 = 0)")
    scp = scp_closed_form(cfg.n_private_paths, eve.l_e1, budget.a_1, budget.a_2)
    return finalize(scp, {"A_1": budget.a_1, "A_2": budget.a_2})
