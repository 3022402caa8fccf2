"""Scenario IV: the eavesdropper overlaps only common paths, with interference
from U2's private paths.

SCP = E[ F̄_{gamma_1c}(Theta_c gamma_ec + Theta_c - 1) ]. The CCDF of
gamma_1c is a finite sum of ``x^t (1 + x d1/d1c)^{-(m+Lp)} e^{-x/d1c}``
terms, and the pdf of gamma_ec is a finite sum obtained by differentiating
its CCDF, so every term reduces to one phi integral (Delta_9 or Delta_10).
"""

from __future__ import annotations

import math
from functools import lru_cache

from ..errors import ScenarioMismatch
from ..model import EveLayout, LinkBudget, Scenario, SystemConfig
from ..specfun import PhiParams, phi_integral
from ._common import (
    Ctx,
    SecrecyResult,
    SignedSum,
    finalize,
    lfact,
    log_rising,
    logsumexp,
    xlogy,
    zero_result,
)


def log_varpi_1c(ctx: Ctx, t, m) -> float:
    return (
        xlogy(m, ctx.d1)
        + log_rising(m, ctx.Lp)
        - lfact(m)
        - t * math.log(ctx.d1c)
        - lfact(t - m)
    )


def log_varpi_ec(ctx: Ctx, s, n) -> float:
    return (
        xlogy(n, ctx.de2)
        + log_rising(n, ctx.Le2)
        - lfact(n)
        - s * math.log(ctx.dec)
        - lfact(s + 1 - n)
    )


class DeltaPhi:
    """Delta_9 / Delta_10 for one link budget, with phi values cached."""

    def __init__(self, ctx: Ctx, tol: float = 1e-11):
        self.ctx = ctx
        self.tol = tol
        th = ctx.th_c
        self.rate = th / ctx.d1c + 1.0 / ctx.dec
        self.shift = ctx.d1 * (th - 1.0) / ctx.d1c + 1.0
        self.c3 = ctx.d1 * th / (ctx.d1 * (th - 1.0) + ctx.d1c)
        self.c5 = ctx.de2 / ctx.dec
        self._phi = lru_cache(maxsize=None)(self._phi_raw)

    def _phi_raw(self, power: int, r3: int, r5: int) -> float:
        params = PhiParams(self.rate, power, self.c3, r3, self.c5, r5)
        return phi_integral(params, tol=self.tol)

    def value(self, t, m, s, shape) -> float:
        """Delta_9 for ``shape = n + Le2``; Delta_10 for ``shape = n + Le2 + 1``."""
        return math.exp(self.log_value(t, m, s, shape))

    def log_value(self, t, m, s, shape) -> float:
        """log of :meth:`value`; every term is positive, so it stays finite when the value underflows."""
        ctx = self.ctx
        th = ctx.th_c
        r3 = m + ctx.Lp
        parts = []
        for o in range(t + 1):
            log_coef = (
                lfact(t)
                - lfact(o)
                - lfact(t - o)
                + o * math.log(th)
                + xlogy(t - o, th - 1.0)
                - (th - 1.0) / ctx.d1c
                - r3 * math.log(self.shift)
            )
            if log_coef == -math.inf:
                continue
            parts.append(log_coef + math.log(self._phi(s + o, r3, shape)))
        return float(logsumexp(parts))


def scp_core(ctx: Ctx):
    Lc, Lec, Le2 = ctx.Lc, ctx.Lec, ctx.Le2
    delta = DeltaPhi(ctx)
    first = SignedSum()
    second = SignedSum()
    for t in range(Lc):
        for m in range(t + 1):
            lw1 = log_varpi_1c(ctx, t, m)
            if lw1 == -math.inf:
                continue
            for s in range(Lec):
                for n in range(s + 1):
                    lw = lw1 + log_varpi_ec(ctx, s, n)
                    if lw == -math.inf:
                        continue
                    lw += math.log(s + 1 - n)
                    first.add(1.0, lw - math.log(ctx.dec) + delta.log_value(t, m, s, n + Le2))
                    if ctx.de2 > 0.0 and n + Le2 > 0:
                        ld10 = delta.log_value(t, m, s, n + Le2 + 1)
                        first.add(1.0, lw + math.log(ctx.de2 / ctx.dec) + math.log(n + Le2) + ld10)
            for s in range(Lec - 1):
                for n in range(s + 2):
                    lw = lw1 + log_varpi_ec(ctx, s, n)
                    if lw == -math.inf:
                        continue
                    ld9 = delta.log_value(t, m, s, n + Le2)
                    second.add(1.0, lw + math.log(s + 1) - math.log(ctx.dec) + ld9)
    part1, part2 = first.value(), second.value()
    return part1 - part2, {"pdf_main_sum": part1, "pdf_shift_sum": part2}


def scp_scenario_4(cfg: SystemConfig, eve: EveLayout, budget: LinkBudget, quad=None) -> SecrecyResult:
    if eve.scenario is not Scenario.IV:
        raise ScenarioMismatch(f"Scenario IV evaluator called with Scenario {eve.scenario.value}")
    eve.validate(cfg)
    if budget.delta_1c == 0.0:
        return zero_result("no common power (delta_1c = 0)")
    ctx = Ctx.build(cfg, eve, budget)
    scp, diagnostics = scp_core(ctx)
    return finalize(scp, diagnostics)
