"""Scenario II: all of U1's private paths and part of its common paths are overlapped.

SCP = sum_t c_t * Delta_2(t) - sum_{t,m,k,n} A3 * A4 * Delta_3(t, m, k, n), where
Delta_2 is an exact finite sum and Delta_3 uses an ``order_I``-point
Chebyshev rule plus G^{2,1}_{1,2} terms.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ScenarioMismatch
from ..model import EveLayout, LinkBudget, Scenario, SystemConfig
from ..quadrature import QuadratureSpec
from ..specfun import log_meijer_g_2112
from ._common import (
    THETA_OFFSET,
    Ctx,
    SecrecyResult,
    SignedSum,
    chebyshev_endpoint_log_weight,
    chebyshev_rule,
    finalize,
    lfact,
    log_endpoint_corrected,
    logsumexp,
    xlogy,
    zero_result,
)


def log_delta_2(ctx: Ctx, t: int) -> float:
    """log of Delta_2(t): the quadruple A5 sum (alternating in k - i)."""
    Lp, Le1, th = ctx.Lp, ctx.Le1, ctx.th_p
    mu = ctx.mu
    rate = th * mu + 1.0 / ctx.de1
    acc = SignedSum()
    base = 1.0 / ctx.d1 - th * mu + lfact(t)
    for m in range(t + 1):
        for k in range(m + Lp):
            for i in range(k + 1):
                for j in range(i + 1):
                    log_a5 = (
                        base
                        + lfact(m + Lp - 1)
                        + i * math.log(th)
                        - lfact(m)
                        - lfact(t - m)
                        - (m + Lp - k) * math.log(mu)
                        - lfact(k - i)
                        - lfact(j)
                        - lfact(i - j)
                    )
                    log_term = log_a5 + lfact(j + Le1 - 1) - (j + Le1) * math.log(rate)
                    acc.add(-1.0 if (k - i) % 2 else 1.0, log_term)
    value = acc.value()
    return math.log(value) if value > 0 else -math.inf


def log_a3(ctx: Ctx, t, m, k):
    """(sign, log|A3|)."""
    Lc = ctx.Lc
    mag = (
        lfact(m + Lc - 1)
        + xlogy(t - m + k, ctx.eta1)
        + (m + Lc - k - t) * math.log(ctx.eta2)
        - lfact(k)
        - lfact(m)
        - lfact(t - m)
        - math.lgamma(Lc)
    )
    return (-1.0 if (t - m) % 2 else 1.0), mag


def log_a4(ctx: Ctx, n):
    Lc, Lp, Le1 = ctx.Lc, ctx.Lp, ctx.Le1
    return (
        lfact(Lc)
        - ctx.eta1
        - Lp * math.log(ctx.d1)
        - Le1 * math.log(ctx.de1)
        - lfact(n)
        - lfact(Lc - n)
        - lfact(Lp - 1)
        - lfact(Le1 - 1)
    )


class Delta3:
    """Evaluates Delta_3(t, m, k, n) on a fixed Chebyshev rule, sharing G tables."""

    def __init__(self, ctx: Ctx, order: int):
        self.ctx = ctx
        self.order = order
        b, w = chebyshev_rule(order)
        th, eta2 = ctx.th_p, ctx.eta2
        # the last node is the endpoint b = 1, carrying the rule's endpoint correction
        self.b = b = np.append(b, 1.0)
        self.log_w = np.append(np.log(w), chebyshev_endpoint_log_weight(order))
        self.c = eta2 * th + b
        b2 = eta2 * (th - 1.0) + b + b * eta2
        self.b3 = b2 / self.c
        self.p = ctx.mu * th / b + 1.0 / ctx.de1
        self.z = self.p * self.b3
        self._g = {}

    def _log_g(self, s: int, M: int):
        key = (s, M)
        if key not in self._g:
            self._g[key] = log_meijer_g_2112(self.z, 1 - s, M - s, 0.0)
        return self._g[key]

    def log_value(self, t, m, k, n) -> float:
        ctx = self.ctx
        Lc, Lp, Le1, th = ctx.Lc, ctx.Lp, ctx.Le1, ctx.th_p
        M = m + Lc - k
        a1 = n + Lp + 1 - M
        base = (
            self.log_w
            + lfact(t)
            + lfact(n + Lp)
            - a1 * np.log(self.b)
            - ctx.mu * (th - 1.0) / self.b
            - M * np.log(self.c)
            - math.lgamma(M)
        )
        parts = []
        for j in range(n + Lp + 1):
            log_j = j * math.log(th) + xlogy(n + Lp - j, th - 1.0) - lfact(j) - lfact(n + Lp - j)
            if log_j == -math.inf:
                continue
            for q in range(t + 1):
                s = j + q + Le1
                a2 = s - M
                log_a6 = base + log_j - lfact(q) - lfact(t - q)
                parts.append(log_a6 + a2 * np.log(self.b3) + self._log_g(s, M))
        parts = np.stack(parts)
        rule = logsumexp(parts[:, :-1].ravel())
        return float(log_endpoint_corrected(rule, logsumexp(parts[:, -1])))


def scp_core(ctx: Ctx, order_I: int):
    """Scenario II SCP for arbitrary (L_ec, L_e1) counts; returns (scp, diagnostics)."""
    Lc, Lp, Lec, Le1 = ctx.Lc, ctx.Lp, ctx.Lec, ctx.Le1
    first = SignedSum()
    for t in range(Lc):
        ld2 = log_delta_2(ctx, t)
        first.add(
            1.0,
            -Lp * math.log(ctx.d1)
            + xlogy(t, ctx.eta1)
            - Le1 * math.log(ctx.de1)
            + ld2
            - lfact(t)
            - lfact(Lp - 1)
            - lfact(Le1 - 1),
        )
    d3 = Delta3(ctx, order_I)
    second = SignedSum()
    for t in range(Lec):
        for m in range(t + 1):
            for k in range(m + Lc):
                sign, la3 = log_a3(ctx, t, m, k)
                for n in range(Lc + 1):
                    second.add(sign, la3 + log_a4(ctx, n) + d3.log_value(t, m, k, n))
    part1, part2 = first.value(), second.value()
    diagnostics = {"Delta_2_sum": part1, "Delta_3_sum": part2, "Delta_3_max_term": second.magnitude()}
    return part1 - part2, diagnostics


def scp_scenario_2(
    cfg: SystemConfig, eve: EveLayout, budget: LinkBudget, quad: QuadratureSpec | None = None
) -> SecrecyResult:
    if eve.scenario is not Scenario.II:
        raise ScenarioMismatch(f"Scenario II evaluator called with Scenario {eve.scenario.value}")
    eve.validate(cfg)
    quad = quad or QuadratureSpec()
    if budget.delta_1 == 0.0 or cfg.n_private_paths == 0:
        return zero_result("no private stream power or paths")
    if budget.delta_1c == 0.0:
        return zero_result("no common power (delta_1c = 0)")
    flags = []
    theta_p = budget.theta_p
    if theta_p == 1.0:
        theta_p = 1.0 + THETA_OFFSET
        flags.append("theta_p_offset")
    ctx = Ctx.build(cfg, eve, budget, theta_p=theta_p)
    scp, diagnostics = scp_core(ctx, quad.order_I)
    return finalize(scp, diagnostics, flags)
