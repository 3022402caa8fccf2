"""Dual evaluation of individual closed-form terms.

Every Delta/nabla/Xi term is evaluated twice: through its closed form (Meijer
G, Chebyshev and Laguerre sums) and through the integral it was derived from
(:mod:`.preforms`).  The closed forms that carry a quadrature rule are first
driven to their own convergence by doubling the rule, so what is compared is
the formula, not the truncation error of a default order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..model import EveLayout, LinkBudget, Scenario, SystemConfig
from . import preforms
from . import scenario_1 as s1
from . import scenario_2 as s2
from . import scenario_3 as s3
from . import scenario_4 as s4
from ._common import THETA_OFFSET, Ctx

log = logging.getLogger(__name__)

DEFAULT_RTOL = 1e-6
REFINE_RTOL = 1e-9
MAX_CHEBYSHEV = 1 << 17
MAX_LAGUERRE = 4096


@dataclass(frozen=True)
class TermCheck:
    term: str
    index: tuple
    closed: float
    reference: float
    order: int = 0

    @property
    def rel_err(self) -> float:
        if self.reference == 0.0:
            return 0.0 if self.closed == 0.0 else math.inf
        return abs(self.closed - self.reference) / abs(self.reference)

    def as_dict(self) -> dict:
        return {
            "term": self.term,
            "index": list(self.index),
            "closed": self.closed,
            "reference": self.reference,
            "rel_err": self.rel_err,
            "order": self.order,
        }


def refine(evaluate, order: int, max_order: int, rtol: float = REFINE_RTOL):
    """Double ``order`` until the value changes by at most ``rtol`` (relative).

    Returns ``(value, order)``; at ``max_order`` the last value is returned.
    """
    f_prev = evaluate(order)
    while order * 2 <= max_order:
        order *= 2
        f = evaluate(order)
        if abs(f - f_prev) <= rtol * abs(f):
            return f, order
        f_prev = f
    return f_prev, order


def _scalar(x) -> float:
    return float(np.asarray(x).ravel()[0])


# Closed forms at converged orders --------------------------------------------


def closed_delta_3(ctx: Ctx, idx, order: int = 50):
    return refine(lambda I: math.exp(s2.Delta3(ctx, I).log_value(*idx)), order, MAX_CHEBYSHEV)


def closed_nabla_1(ctx: Ctx, z: float, idx, order: int = 50):
    def ev(N):
        return math.exp(_scalar(s3.Xi2(ctx, s3.chebyshev_order_nabla_1(N, ctx), 1).log_nabla_1(z, *idx)))

    return refine(ev, order, MAX_CHEBYSHEV)


def closed_xi_2(ctx: Ctx, idx, order: int = 50):
    def ev(n):
        N = min(s3.chebyshev_order_nabla_1(n, ctx), MAX_CHEBYSHEV // 8)
        return math.exp(s3.Xi2(ctx, N, min(n, MAX_LAGUERRE)).log_value(*idx))

    return refine(ev, order, MAX_LAGUERRE)


def closed_nabla_2(ctx: Ctx, z: float, idx, order: int = 50):
    return refine(lambda K: math.exp(_scalar(s3.Xi3(ctx, K, 1).log_nabla_2(z, *idx))), order, MAX_LAGUERRE)


def closed_xi_3(ctx: Ctx, idx, order: int = 50):
    def ev(n):
        D = min(s3.laguerre_order_xi_3(n, ctx), MAX_LAGUERRE)
        return math.exp(s3.Xi3(ctx, n, D).log_value(*idx))

    return refine(ev, order, MAX_LAGUERRE)


def closed_delta_7(ctx: Ctx, idx, order: int = 50):
    def ev(n):
        N = min(s3.chebyshev_order_nabla_1(n, ctx), MAX_CHEBYSHEV // 8)
        return math.exp(s3.log_delta_7(ctx, s3.Xi2(ctx, N, min(n, MAX_LAGUERRE)), *idx))

    return refine(ev, order, MAX_LAGUERRE)


def closed_delta_8(ctx: Ctx, idx, order: int = 50):
    def ev(n):
        D = min(s3.laguerre_order_xi_3(n, ctx), MAX_LAGUERRE)
        return math.exp(s3.log_delta_8(ctx, s3.Xi3(ctx, n, D), *idx))

    return refine(ev, order, MAX_LAGUERRE)


# Term registry ---------------------------------------------------------------


def check_term(ctx: Ctx, term: str, idx: tuple) -> TermCheck:
    """Evaluate one term both ways.  ``idx`` follows the closed-form signature."""
    order = 0
    if term == "scenario_1":
        a1, a2 = idx
        closed = s1.scp_closed_form(ctx.Lp, ctx.Le1, a1, a2)
        ref = preforms.scenario_1(ctx.Lp, ctx.Le1, a1, a2)
    elif term == "Delta_2":
        closed, ref = math.exp(s2.log_delta_2(ctx, *idx)), preforms.delta_2(ctx, *idx)
    elif term == "Delta_3":
        (closed, order), ref = closed_delta_3(ctx, idx), preforms.delta_3(ctx, *idx)
    elif term == "Delta_5":
        closed, ref = s3.delta_5(ctx), preforms.delta_5(ctx)
    elif term == "Delta_6":
        closed, ref = math.exp(s3.log_delta_6(ctx, *idx)), preforms.delta_6(ctx, *idx)
    elif term == "Xi_1":
        closed, ref = math.exp(s3.log_xi_1(ctx, *idx)), preforms.xi_1(ctx, *idx)
    elif term == "nabla_1":
        z, rest = idx[0], idx[1:]
        (closed, order), ref = closed_nabla_1(ctx, z, rest), preforms.nabla_1(ctx, z, *rest)
    elif term == "Xi_2":
        (closed, order), ref = closed_xi_2(ctx, idx), preforms.xi_2(ctx, *idx)
    elif term == "nabla_2":
        z, rest = idx[0], idx[1:]
        (closed, order), ref = closed_nabla_2(ctx, z, rest), preforms.nabla_2(ctx, z, *rest)
    elif term == "Xi_3":
        (closed, order), ref = closed_xi_3(ctx, idx), preforms.xi_3(ctx, *idx)
    elif term == "Delta_7":
        (closed, order), ref = closed_delta_7(ctx, idx), preforms.delta_7(ctx, *idx)
    elif term == "Delta_8":
        (closed, order), ref = closed_delta_8(ctx, idx), preforms.delta_8(ctx, *idx)
    elif term in ("Delta_9", "Delta_10"):
        t, m, s, n = idx
        shape = n + ctx.Le2 + (1 if term == "Delta_10" else 0)
        closed = s4.DeltaPhi(ctx).value(t, m, s, shape)
        ref = preforms.delta_9(ctx, t, m, s, shape)
    else:
        raise KeyError(f"unknown term {term!r}")
    return TermCheck(term, tuple(idx), float(closed), float(ref), order)


def representative_terms(ctx: Ctx, scenario: Scenario, a1: float = 0.0, a2: float = 0.0):
    """(term, index) pairs covering the first and last index of every term family."""
    Lc, Lec, Le1 = ctx.Lc, ctx.Lec, ctx.Le1
    if scenario is Scenario.I:
        return [("scenario_1", (a1, a2))]
    if scenario is Scenario.II:
        t = Lec - 1
        return [
            ("Delta_2", (0,)),
            ("Delta_2", (Lc - 1,)),
            ("Delta_3", (0, 0, 0, 0)),
            ("Delta_3", (t, t, t + Lc - 1, Lc)),
        ]
    if scenario is Scenario.III:
        t = Lec - 1
        return [
            ("Delta_5", ()),
            ("Delta_6", (0,)),
            ("Delta_6", (Le1 - 1,)),
            ("Xi_1", (Le1 - 1, Lc - 1, ctx.Lp - 1, Le1 - 1)),
            ("nabla_1", (1.0, t, t, Lc - 1)),
            ("Xi_2", (0, 0, 0)),
            ("Xi_2", (t, t, Lc - 1)),
            ("nabla_2", (1.0, t, t, t + Le1 - 1, Lc - 1)),
            ("Xi_3", (0, 0, 0, 0)),
            ("Xi_3", (t, t, t + Le1 - 1, Lc - 1)),
            ("Delta_7", (0, 0)),
            ("Delta_8", (0, 0, 0)),
        ]
    terms = [("Delta_9", (0, 0, 0, 0)), ("Delta_9", (Lc - 1, Lc - 1, Lec - 1, Lec - 1))]
    if ctx.de2 > 0 and ctx.Le2 > 0:
        terms.append(("Delta_10", (Lc - 1, 0, Lec - 1, 0)))
    return terms


def run_term_checks(
    cfg: SystemConfig, eve: EveLayout, budget: LinkBudget, rtol: float = DEFAULT_RTOL
) -> list[TermCheck]:
    """Dual-evaluate the representative terms of ``eve.scenario``; log disagreements."""
    scenario = eve.scenario
    theta_p = budget.theta_p if budget.theta_p > 1.0 else 1.0 + THETA_OFFSET
    ctx = Ctx.build(cfg, eve, budget, theta_p=theta_p)
    if scenario is Scenario.III and (ctx.Le2 == 0 or ctx.de2 == 0.0):
        scenario = Scenario.II
    results = []
    for term, idx in dict.fromkeys(representative_terms(ctx, scenario, budget.a_1, budget.a_2)):
        check = check_term(ctx, term, idx)
        if not check.rel_err <= rtol:
            log.warning(
                "closed form of %s%s disagrees with its integral form: %.12g vs %.12g (rel %.2e)",
                term,
                idx,
                check.closed,
                check.reference,
                check.rel_err,
            )
        results.append(check)
    return results
