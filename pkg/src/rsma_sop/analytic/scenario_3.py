"""Scenario III: all common paths and part of the private paths are overlapped,
with interference from U2's private paths at the eavesdropper.

SCP = Delta_5 - sum_t Delta_6(t)/t! - sum_{t,m} Delta_7 + sum_{t,m,k} Delta_8.

Delta_7 is built from a Chebyshev rule (order N) in nabla_1 and a Laguerre
rule (order V) in Xi_2; Delta_8 from two nested Laguerre rules (orders K and
D) in nabla_2 and Xi_3.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ScenarioMismatch
from ..model import EveLayout, LinkBudget, Scenario, SystemConfig
from ..quadrature import QuadratureSpec, laguerre_nodes
from ..specfun import log_gamma_upper, log_meijer_g_2112
from . import scenario_2
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


def delta_5(ctx: Ctx) -> float:
    Lc, Lp, th, mu = ctx.Lc, ctx.Lp, ctx.th_p, ctx.mu
    acc = SignedSum()
    for t in range(Lc):
        for m in range(t + 1):
            acc.add(
                1.0,
                xlogy(t, ctx.eta1)
                - ctx.eta1
                + log_gamma_upper(m + Lp, mu * (th - 1.0))
                - Lp * math.log(ctx.d1)
                - lfact(m)
                - lfact(t - m)
                - lfact(Lp - 1)
                - (m + Lp) * math.log(mu),
            )
    return acc.value()


def log_b1(ctx: Ctx, t, m):
    return m * math.log(ctx.de1) + lfact(m + ctx.Le1 - 1) - lfact(m) - lfact(t - m) - math.lgamma(ctx.Le1)


def log_b3(ctx: Ctx, t, m, n):
    Lc = ctx.Lc
    return (
        log_b1(ctx, t, m)
        + lfact(Lc - 1)
        + xlogy(Lc - 1 - n, ctx.eta1)
        + (n + 1) * math.log(ctx.eta2)
        - lfact(n)
        - lfact(Lc - 1 - n)
    )


def eta_3(ctx: Ctx) -> float:
    return ctx.th_p * ctx.de1 / ctx.d1 + ctx.th_p * ctx.de1 * ctx.eta1


def log_xi_1(ctx: Ctx, t, n, i, j) -> float:
    a3 = t + n + i + 1
    a4 = j + ctx.Le2
    e3 = eta_3(ctx)
    return (
        (a4 - a3) * math.log1p(e3)
        - math.lgamma(a3)
        + log_meijer_g_2112((1.0 + e3) / ctx.de2, 1 - a4, a3 - a4, 0.0)
    )


def log_delta_6(ctx: Ctx, t) -> float:
    Lc, Lp, Le2, th = ctx.Lc, ctx.Lp, ctx.Le2, ctx.th_p
    parts = []
    expo = ctx.eta1 * th + (th - 1.0) / ctx.d1
    for m in range(Lc):
        for n in range(m + 1):
            for i in range(Lp):
                log_b2 = (
                    xlogy(Lp - 1 - i, th - 1.0)
                    + (m + 1 + i) * math.log(th)
                    + (i + n + 1) * math.log(ctx.de1)
                    + xlogy(m, ctx.eta1)
                    - lfact(i)
                    - lfact(Lp - 1 - i)
                    - lfact(n)
                    - lfact(m - n)
                    - Lp * math.log(ctx.d1)
                    - expo
                )
                if log_b2 == -math.inf:
                    continue
                for j in range(t + 1):
                    parts.append(
                        log_b2
                        + lfact(t + n + i)
                        + lfact(t)
                        + log_xi_1(ctx, t, n, i, j)
                        - lfact(j)
                        - lfact(t - j)
                        - Le2 * math.log(ctx.de2)
                        - lfact(Le2 - 1)
                    )
    return float(logsumexp(parts)) if parts else -math.inf


MAX_ORDER = 8192  # node counts beyond this are capped and the result flagged


def chebyshev_order_nabla_1(order_N: int, ctx: Ctx) -> int:
    """Node count actually used for nabla_1 (before capping).

    The nabla_1 integrand peaks at b ~ mu/(k + L_p) on (0, 1/(Theta_p - 1)),
    so the rule needs a node count proportional to sqrt(T/mu).  ``order_N``
    is the count per unit of that ratio, which keeps doubling it meaningful.
    """
    ratio = math.sqrt(1.0 / ((ctx.th_p - 1.0) * ctx.mu))
    return order_N * max(1, math.ceil(ratio / 2.0))


def laguerre_order_xi_3(order_D: int, ctx: Ctx) -> int:
    """Node count actually used for the outer Xi_3 rule (before capping).

    With z = 1 + de2*s the Xi_3 integrand carries (1 + b5 + de2*s)^{-(i+j+1)},
    which varies on the scale 1/de2 in s; a Laguerre rule needs about de2
    times more nodes to resolve it.
    """
    return order_D * max(1, math.ceil(ctx.de2))


LAGUERRE_DROP = 46.0  # tail nodes this far (in log) below the largest term are skipped


def _laguerre_head(lag, p_min: int, p_max: int) -> int:
    """Number of leading Laguerre nodes worth evaluating for ``t^p`` weights, p in [p_min, p_max].

    The Meijer G factor multiplying these terms decreases along the nodes, so a
    node whose weight times ``t^p`` is negligible for every p, and that lies past
    the largest such term, cannot matter.
    """
    log_t = np.log(lag.nodes)
    bound = np.maximum(lag.log_weights + p_min * log_t, lag.log_weights + p_max * log_t)
    top = int(np.argmax(bound))
    tail = np.nonzero(bound[top:] < bound[top] - LAGUERRE_DROP)[0]
    return top + int(tail[0]) if tail.size else bound.size


class Xi2:
    """Xi_2(t, m, n): Chebyshev rule for nabla_1 combined with a Laguerre rule."""

    def __init__(self, ctx: Ctx, order_N: int, order_V: int):
        self.ctx = ctx
        b, w = chebyshev_rule(order_N)
        span = 1.0 / (ctx.th_p - 1.0)
        # the last node is the endpoint b4 = span, carrying the rule's endpoint correction
        self.b4 = span * np.append(b, 1.0)
        # pi/N * sqrt(span - b4) * sqrt(b4), split as in B_4: sqrt(span-b4) * b4^{-(k+Lp+1/2)}
        with np.errstate(divide="ignore"):
            self.log_cheb = math.log(math.pi / order_N) + 0.5 * np.log(span - self.b4)
        self.log_cheb[-1] = chebyshev_endpoint_log_weight(order_N) + 0.5 * math.log(span)
        lag = laguerre_nodes(order_V)
        keep = _laguerre_head(lag, ctx.Le2 - 1, ctx.Lec + ctx.Le2 - 2)
        self.t_u = lag.nodes[:keep]
        self.log_w_u = lag.log_weights[:keep]
        b4 = self.b4[:, None]
        self.arg = (b4 * ctx.de2 * self.t_u[None, :] + b4 + (b4 + 1.0) * ctx.eta2) / (ctx.de1 * b4)
        self._g = {}

    def _log_g(self, nt: int, m: int):
        key = (nt, m)
        if key not in self._g:
            a6 = m + self.ctx.Le1 - nt - 1
            self._g[key] = log_meijer_g_2112(self.arg, -nt, a6, 0.0)
        return self._g[key]

    def _log_b4_common(self, t, m, n):
        ctx = self.ctx
        return (
            self.log_cheb
            + lfact(ctx.Lc)
            - (n + t + 1) * math.log(ctx.de1)
            - ctx.eta1
            - math.lgamma(m + ctx.Le1)
            - ctx.mu / self.b4
        )

    def log_nabla_1(self, z, t, m, n):
        """log nabla_1 at interference levels ``z >= 1`` (the closed form before the Xi_2 rule)."""
        ctx = self.ctx
        z = np.atleast_1d(np.asarray(z, float))
        b4 = self.b4[:, None]
        arg = (b4 * z[None, :] + (b4 + 1.0) * ctx.eta2) / (ctx.de1 * b4)
        log_g = log_meijer_g_2112(arg, -(n + t), m + ctx.Le1 - n - t - 1, 0.0)
        common = self._log_b4_common(t, m, n)
        parts = [
            (common - lfact(k) - lfact(ctx.Lc - k) - (k + ctx.Lp + 0.5) * np.log(self.b4))[:, None] + log_g
            for k in range(ctx.Lc + 1)
        ]
        parts = np.stack(parts)
        rule = logsumexp(parts[:, :-1, :], axis=(0, 1))
        end = logsumexp(parts[:, -1, :], axis=0)
        return np.array([log_endpoint_corrected(r, e) for r, e in zip(rule, end)])

    def log_value(self, t, m, n) -> float:
        ctx = self.ctx
        Lc, Lp, Le2 = ctx.Lc, ctx.Lp, ctx.Le2
        log_b4_common = self._log_b4_common(t, m, n)
        log_g = self._log_g(n + t, m)
        # the k sum only involves b4 and the j sum only u, so both collapse first
        log_b4 = logsumexp(
            np.stack([-lfact(k) - lfact(Lc - k) - (k + Lp + 0.5) * np.log(self.b4) for k in range(Lc + 1)]), axis=0
        )
        log_u = logsumexp(
            np.stack(
                [
                    -lfact(j) - lfact(t - m - j) + (j + Le2) * math.log(ctx.de2) + (j + Le2 - 1) * np.log(self.t_u)
                    for j in range(t - m + 1)
                ]
            ),
            axis=0,
        )
        parts = (log_b4_common + log_b4)[:, None] + (lfact(t - m) + self.log_w_u + log_u)[None, :] + log_g
        rule = logsumexp(parts[:-1].ravel())
        return float(log_endpoint_corrected(rule, logsumexp(parts[-1])))


class Xi3:
    """Xi_3(t, m, k, n): nested Laguerre rules of orders K (inner) and D (outer)."""

    def __init__(self, ctx: Ctx, order_K: int, order_D: int):
        self.ctx = ctx
        th = ctx.th_p
        inner = laguerre_nodes(order_K)
        outer = laguerre_nodes(order_D)
        self.u_v = inner.nodes[:, None]
        self.log_q_v = inner.log_weights[:, None]
        self.s_u = outer.nodes[None, :]
        self.log_eps_u = outer.log_weights[None, :]
        self.b5 = ctx.de1 * th * ctx.eta1 + ctx.de1 * th / ctx.d1
        self.den = ctx.de2 * self.s_u + 1.0 + self.b5
        # The G argument s*de2/de1 + u(th*eta2 - b5)/den + u + (1 + th*eta2)/de1,
        # regrouped as a product of positive factors to avoid cancellation.
        self.arg = (1.0 + ctx.de2 * self.s_u + th * ctx.eta2) * (self.u_v / self.den + 1.0 / ctx.de1)
        self._g = {}

    def _log_g(self, nt: int, a6: int):
        key = (nt, a6)
        if key not in self._g:
            self._g[key] = log_meijer_g_2112(self.arg, -nt, a6, 0.0)
        return self._g[key]

    def _log_b5(self, t, m, k, n, i, j) -> float:
        ctx = self.ctx
        Lc, Lp, th = ctx.Lc, ctx.Lp, ctx.th_p
        return (
            lfact(Lc)
            + lfact(Lp - 1)
            + (Lc + j + 1) * math.log(th)
            + xlogy(Lp - 1 - j, th - 1.0)
            - (th * ctx.eta1 + (th - 1.0) / ctx.d1)
            - lfact(i)
            - lfact(Lc - i)
            - lfact(j)
            - lfact(Lp - 1 - j)
            - (k + n + t + 1) * math.log(ctx.de1)
            - math.lgamma(m + ctx.Le1 - k)
        )

    def log_nabla_2(self, z, t, m, k, n):
        """log nabla_2 at interference levels ``z >= 1`` (the closed form before the Xi_3 rule)."""
        ctx = self.ctx
        z = np.atleast_1d(np.asarray(z, float))[None, :]
        den = z + self.b5
        arg = (z + ctx.th_p * ctx.eta2) * (self.u_v / den + 1.0 / ctx.de1)
        log_g = log_meijer_g_2112(arg, -(n + t), m + ctx.Le1 - k - n - t - 1, 0.0)
        parts = []
        for i in range(ctx.Lc + 1):
            for j in range(ctx.Lp):
                e = i + j + k
                log_b5 = self._log_b5(t, m, k, n, i, j)
                if log_b5 == -math.inf:
                    continue
                parts.append(
                    log_b5
                    + self.log_q_v
                    + (e + 1) * math.log(ctx.de1)
                    + xlogy_array(k, z)
                    - (e + 1) * np.log(den)
                    + xlogy_array(e, self.u_v)
                    + log_g
                )
        return logsumexp(np.stack(parts), axis=(0, 1))

    def log_value(self, t, m, k, n) -> float:
        ctx = self.ctx
        Lc, Lp, Le2 = ctx.Lc, ctx.Lp, ctx.Le2
        a6 = m + ctx.Le1 - k - n - t - 1
        log_den = np.log(self.den)
        ij_parts = []
        for i in range(Lc + 1):
            for j in range(Lp):
                log_b5 = self._log_b5(t, m, k, n, i, j)
                if log_b5 == -math.inf:
                    continue
                e = i + j + k
                ij_parts.append(
                    log_b5
                    + (e + 1) * math.log(ctx.de1)
                    + self.log_q_v
                    + xlogy_array(e, self.u_v)
                    - (e + 1) * log_den
                )
        log_ij = logsumexp(np.stack(ij_parts), axis=0)
        top = k + t - m
        q_parts = []
        for q in range(top + 1):
            q_parts.append(
                lfact(top)
                - lfact(q)
                - lfact(top - q)
                + self.log_eps_u
                + (q + Le2) * math.log(ctx.de2)
                + (q + Le2 - 1) * np.log(self.s_u)
            )
        log_q = logsumexp(np.stack(q_parts), axis=0)
        return float(logsumexp(log_ij + log_q + self._log_g(n + t, a6)))


def xlogy_array(a, y):
    return np.zeros_like(y) if a == 0 else a * np.log(y)


def _log_tail(ctx: Ctx) -> float:
    return (
        -ctx.Lp * math.log(ctx.d1)
        - ctx.Le2 * math.log(ctx.de2)
        - math.lgamma(ctx.Lc)
        - lfact(ctx.Lp - 1)
        - lfact(ctx.Le2 - 1)
    )


def log_delta_7(ctx: Ctx, xi2: Xi2, t, m) -> float:
    parts = [log_b3(ctx, t, m, n) + xi2.log_value(t, m, n) for n in range(ctx.Lc)]
    return float(logsumexp(parts)) + _log_tail(ctx)



def log_delta_8(ctx: Ctx, xi3: Xi3, t, m, k) -> float:
    parts = [log_b3(ctx, t, m, n) + xi3.log_value(t, m, k, n) for n in range(ctx.Lc)]
    return float(logsumexp(parts)) + _log_tail(ctx) - lfact(k)


def scp_core(ctx: Ctx, quad: QuadratureSpec):
    d5 = delta_5(ctx)
    s6 = SignedSum()
    for t in range(ctx.Le1):
        s6.add(1.0, log_delta_6(ctx, t) - lfact(t))
    flags = []
    order_N = chebyshev_order_nabla_1(quad.order_N, ctx)
    order_D = laguerre_order_xi_3(quad.order_D, ctx)
    if order_N > MAX_ORDER:
        order_N = MAX_ORDER
        flags.append("order_N_capped")
    if order_D > MAX_ORDER:
        order_D = MAX_ORDER
        flags.append("order_D_capped")
    xi2 = Xi2(ctx, order_N, quad.order_V)
    xi3 = Xi3(ctx, quad.order_K, order_D)
    s7 = SignedSum()
    s8 = SignedSum()
    for t in range(ctx.Lec):
        for m in range(t + 1):
            s7.add(1.0, log_delta_7(ctx, xi2, t, m))
            for k in range(m + ctx.Le1):
                s8.add(1.0, log_delta_8(ctx, xi3, t, m, k))
    d6, d7, d8 = s6.value(), s7.value(), s8.value()
    acc = SignedSum()
    for value in (d5, -d6, -d7, d8):
        acc.add_value(value)
    diagnostics = {
        "Delta_5": d5,
        "Delta_6_sum": d6,
        "Delta_7_sum": d7,
        "Delta_8_sum": d8,
        "order_N_used": order_N,
        "order_D_used": order_D,
    }
    return acc.value(), diagnostics, flags


def scp_scenario_3(
    cfg: SystemConfig, eve: EveLayout, budget: LinkBudget, quad: QuadratureSpec | None = None
) -> SecrecyResult:
    if eve.scenario is not Scenario.III:
        raise ScenarioMismatch(f"Scenario III evaluator called with Scenario {eve.scenario.value}")
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
    if eve.l_e2 == 0 or budget.delta_e2 == 0.0:
        # No interference at the eavesdropper: the Scenario II expressions apply.
        scp, diagnostics = scenario_2.scp_core(ctx, quad.order_I)
        diagnostics["routed_to"] = "II"
    else:
        scp, diagnostics, capped = scp_core(ctx, quad)
        flags.extend(capped)
    return finalize(scp, diagnostics, flags, converged=not any(f.endswith("_capped") for f in flags))
