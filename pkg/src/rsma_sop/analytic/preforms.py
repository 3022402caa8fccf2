"""Pre-closed-form integrals of the closed-form terms, evaluated adaptively.

Each function integrates the expression a closed form was derived from, using
only gamma densities, elementary functions, :func:`laplace_pow_integral` for
the inner ``int e^{-pu} u^q (cu+1)^{-r} du`` factors and nested calls to
:func:`adaptive_reference`.  No Meijer-G, Chebyshev or Laguerre series from the
closed forms is reused, so agreement is an independent check.

Semi-infinite variables are rescaled to the natural scale of their gamma
density before integration (e.g. ``y = 1 + delta * v``), which keeps QUADPACK's
``[a, inf)`` map well conditioned at every SNR.
"""

from __future__ import annotations

import math

from scipy import special

from ..errors import ConvergenceError
from ..quadrature import adaptive_reference
from ..specfun import LaplacePowParams, laplace_pow_integral
from ._common import Ctx, lfact

TOL = 1e-10
_INF = math.inf


def _quad(f, lo, hi=_INF, tol=TOL, abs_tol=0.0):
    return adaptive_reference(f, lo, hi, tol=tol, abs_tol=abs_tol, limit=1000)


def _gamma_pdf(k, x):
    if x <= 0.0:
        return 0.0
    return math.exp((k - 1) * math.log(x) - x - math.lgamma(k))


def _gamma_ccdf(k, x):
    return float(special.gammaincc(k, x)) if x > 0 else 1.0


def _laplace(p, q, c, r):
    return laplace_pow_integral(LaplacePowParams(p, q, c, r), tol=1e-12)


# ---------------------------------------------------------------------------
# Scenario I


def scenario_1(Lp: int, Le1: int, a1: float, a2: float, tol: float = 1e-12) -> float:
    """``Pr{X_1p > A1 X_ep1 + A2}`` as a direct two-dimensional integral."""

    def outer(x):
        lo = a1 * x + a2
        inner = _quad(lambda y: _gamma_pdf(Lp, y), lo, tol=tol) if lo > 0 else 1.0
        return _gamma_pdf(Le1, x) * inner

    return _quad(outer, 0.0, tol=tol)


# ---------------------------------------------------------------------------
# Scenario II


def delta_2(ctx: Ctx, t: int) -> float:
    """First line of the Delta_2 derivation: a binomial sum of double integrals."""
    th, mu, de1 = ctx.th_p, ctx.mu, ctx.de1
    total = 0.0
    for m in range(t + 1):
        M = m + ctx.Lp

        def outer(v):
            y = 1.0 + de1 * v
            inner = _quad(lambda w: _gamma_pdf(M, w), mu * (y * th - 1.0))
            return math.exp((ctx.Le1 - 1) * math.log(v) - v) * inner if v > 0 else 0.0

        coef = math.exp(lfact(t) - ctx.eta1 - lfact(m) - lfact(t - m) + lfact(M - 1) - M * math.log(mu))
        total += coef * de1**ctx.Le1 * _quad(outer, 0.0)
    return total


def delta_3(ctx: Ctx, t: int, m: int, k: int, n: int) -> float:
    """The Delta_3 double integral (before the Chebyshev rule)."""
    th, mu, de1, eta2 = ctx.th_p, ctx.mu, ctx.de1, ctx.eta2
    M = m + ctx.Lc - k
    q = n + ctx.Lp - 1

    def outer(v):
        if v <= 0:
            return 0.0
        y = 1.0 + de1 * v

        def inner(w):
            z = w / mu
            return math.exp(q * math.log(z) - w - M * math.log(z * eta2 + y + eta2)) if z > 0 else 0.0

        value = _quad(inner, mu * (y * th - 1.0)) / mu
        return value * math.exp(t * math.log(y) + (ctx.Le1 - 1) * math.log(v) - v)

    return de1**ctx.Le1 * _quad(outer, 0.0)


# ---------------------------------------------------------------------------
# Scenario III


def delta_5(ctx: Ctx) -> float:
    """``Pr{X_1c > X_1 eta_1, X_1 > Theta_p}`` as a triple integral over (X_3, X_1, X_1c)."""

    def middle(w):
        y = 1.0 + ctx.d1 * w
        inner = _quad(lambda x: _gamma_pdf(ctx.Lc, x), y * ctx.eta1)
        return _gamma_pdf(ctx.Lp, w) * inner

    x3_mass = _quad(lambda s: _gamma_pdf(ctx.Le2, s), 0.0)
    return x3_mass * _quad(middle, (ctx.th_p - 1.0) / ctx.d1)


def delta_6(ctx: Ctx, t: int) -> float:
    """Defining expectation of Delta_6(t) over X_1c, X_1 and X_3."""
    th = ctx.th_p

    def outer(w):
        y = 1.0 + ctx.d1 * w
        Q = y / th - 1.0

        def inner(s):
            a = Q * (1.0 + ctx.de2 * s) / ctx.de1
            return _gamma_pdf(ctx.Le2, s) * math.exp(t * math.log(a) - a) if a > 0 else 0.0

        return _gamma_ccdf(ctx.Lc, y * ctx.eta1) * _gamma_pdf(ctx.Lp, w) * _quad(inner, 0.0)

    return _quad(outer, (th - 1.0) / ctx.d1)


def xi_1(ctx: Ctx, t: int, n: int, i: int, j: int) -> float:
    """``int_0^inf w^{a4-1} e^{-w/de2} (w + 1 + eta_3)^{-a3} dw``."""
    a3, a4 = t + n + i + 1, j + ctx.Le2
    eta3 = ctx.th_p * ctx.de1 / ctx.d1 + ctx.th_p * ctx.de1 * ctx.eta1
    de2 = ctx.de2

    def f(s):
        return math.exp((a4 - 1) * math.log(s) - s - a3 * math.log(de2 * s + 1.0 + eta3)) if s > 0 else 0.0

    return de2**a4 * _quad(f, 0.0)


def _x1_weight(ctx: Ctx, y: float) -> float:
    """``y^Lc (y-1)^{Lp-1} e^{-y eta_1 - (y-1)/d1}`` for ``y > 1``."""
    return math.exp(ctx.Lc * math.log(y) + (ctx.Lp - 1) * math.log(y - 1.0) - y * ctx.eta1 - (y - 1.0) / ctx.d1)


def nabla_1(ctx: Ctx, z: float, t: int, m: int, n: int, abs_tol: float = 0.0) -> float:
    """nabla_1 at one interference level ``z``, inner u-integral numerically."""
    mu = ctx.mu

    def f(w):
        y = 1.0 + w / mu
        inner = _laplace(z + y * ctx.eta2, n + t, ctx.de1, m + ctx.Le1)
        return inner * _x1_weight(ctx, y)

    return _quad(f, mu * (ctx.th_p - 1.0), abs_tol=abs_tol * mu) / mu


def xi_2(ctx: Ctx, t: int, m: int, n: int, tol: float = 1e-9) -> float:
    """``int_1^inf nabla_1(z) z^{t-m} (z-1)^{Le2-1} e^{-(z-1)/de2} dz``.

    nabla_1 is largest at z = 1, so inner integrals only need absolute
    accuracy relative to that value.
    """
    de2 = ctx.de2
    floor = 1e-3 * tol * nabla_1(ctx, 1.0, t, m, n)

    def f(s):
        if s <= 0:
            return 0.0
        z = 1.0 + de2 * s
        weight = math.exp((t - m) * math.log(z) + (ctx.Le2 - 1) * math.log(s) - s)
        return weight * nabla_1(ctx, z, t, m, n, abs_tol=floor)

    return de2**ctx.Le2 * _quad(f, 0.0, tol=tol)


def nabla_2(ctx: Ctx, z: float, t: int, m: int, k: int, n: int, abs_tol: float = 0.0) -> float:
    """nabla_2 at one interference level ``z``, inner u-integral numerically."""
    mu, th = ctx.mu, ctx.th_p

    def f(w):
        y = 1.0 + w / mu
        A = (y / th - 1.0) * z / ctx.de1
        inner = _laplace(y * z / th + y * ctx.eta2, n + t, ctx.de1, m + ctx.Le1 - k)
        pow_k = A**k if k else 1.0
        return inner * math.exp(-A) * pow_k * _x1_weight(ctx, y)

    return _quad(f, mu * (th - 1.0), abs_tol=abs_tol * mu) / mu


def xi_3(ctx: Ctx, t: int, m: int, k: int, n: int, tol: float = 1e-9) -> float:
    """``int_1^inf nabla_2(z) z^{t-m} (z-1)^{Le2-1} e^{-(z-1)/de2} dz``; see :func:`xi_2`."""
    de2 = ctx.de2
    floor = 1e-3 * tol * nabla_2(ctx, 1.0, t, m, k, n)

    def f(s):
        if s <= 0:
            return 0.0
        z = 1.0 + de2 * s
        weight = math.exp((t - m) * math.log(z) + (ctx.Le2 - 1) * math.log(s) - s)
        return weight * nabla_2(ctx, z, t, m, k, n, abs_tol=floor)

    return de2**ctx.Le2 * _quad(f, 0.0, tol=tol)


def _b1(ctx: Ctx, t, m):
    return math.exp(m * math.log(ctx.de1) + lfact(m + ctx.Le1 - 1) - lfact(m) - lfact(t - m) - math.lgamma(ctx.Le1))


def _x1_x3_expectation(ctx: Ctx, integrand, tol):
    """``E[g(X_1, X_3); X_1 > Theta_p]`` with X_1 = 1 + d1 X_1p and X_3 = 1 + de2 X_ep2.

    A coarse first pass sets the scale; the inner integrals then only need
    absolute accuracy relative to it, since for large X_3 they can vanish
    faster than any relative tolerance can track.
    """
    lo = (ctx.th_p - 1.0) / ctx.d1

    def run(tol_, floor):
        def outer(s):
            x3 = 1.0 + ctx.de2 * s

            def inner(w):
                return _gamma_pdf(ctx.Lp, w) * integrand(1.0 + ctx.d1 * w, x3)

            return _gamma_pdf(ctx.Le2, s) * _quad(inner, lo, tol=tol_, abs_tol=floor)

        return _quad(outer, 0.0, tol=tol_)

    try:
        scale = run(1e-4, 0.0)
    except ConvergenceError as exc:
        scale = exc.estimate
    return run(tol, 1e-3 * tol * abs(scale))


def delta_7(ctx: Ctx, t: int, m: int, tol: float = 1e-9) -> float:
    """Delta_7(t, m) after the X_1c integral is resolved, as an expectation over X_1, X_3."""
    Lc, eta1, eta2 = ctx.Lc, ctx.eta1, ctx.eta2
    total = 0.0
    for n in range(Lc):
        coef = math.comb(Lc - 1, n) * eta1 ** (Lc - 1 - n) * eta2 ** (n + 1) / math.gamma(Lc)

        def g(x1, x3):
            inner = _laplace(x3 + x1 * eta2, n + t, ctx.de1, m + ctx.Le1)
            return x3 ** (t - m) * x1**Lc * math.exp(-x1 * eta1) * inner

        total += coef * _x1_x3_expectation(ctx, g, tol)
    return _b1(ctx, t, m) * total


def delta_8(ctx: Ctx, t: int, m: int, k: int, tol: float = 1e-9) -> float:
    """Delta_8(t, m, k) after the X_1c integral is resolved, as an expectation over X_1, X_3."""
    Lc, eta1, eta2, th = ctx.Lc, ctx.eta1, ctx.eta2, ctx.th_p
    total = 0.0
    for n in range(Lc):
        coef = math.comb(Lc - 1, n) * eta1 ** (Lc - 1 - n) * eta2 ** (n + 1) / math.gamma(Lc)

        def g(x1, x3):
            A = (x1 / th - 1.0) * x3 / ctx.de1
            inner = _laplace(x1 * x3 / th + x1 * eta2, n + t, ctx.de1, m + ctx.Le1 - k)
            pow_k = A**k if k else 1.0
            return x3 ** (t - m) * pow_k * math.exp(-A) * x1**Lc * math.exp(-x1 * eta1) * inner

        total += coef * _x1_x3_expectation(ctx, g, tol)
    return _b1(ctx, t, m) * total / math.factorial(k)


# ---------------------------------------------------------------------------
# Scenario IV


def delta_9(ctx: Ctx, t: int, m: int, s: int, shape: int) -> float:
    """``int_0^inf F_tm(Theta_c y + Theta_c - 1) e^{-y/dec} y^s (de2 y/dec + 1)^{-shape} dy``

    where ``F_tm(x) = e^{-x/d1c} x^t (1 + x d1/d1c)^{-(m+Lp)}``.  Delta_10 is
    the same integral with ``shape`` one larger.
    """
    th = ctx.th_c
    rate = th / ctx.d1c + 1.0 / ctx.dec
    b = ctx.de2 / ctx.dec

    def f(w):
        y = w / rate
        x = th * y + th - 1.0
        log_val = -x / ctx.d1c - (m + ctx.Lp) * math.log1p(x * ctx.d1 / ctx.d1c) - y / ctx.dec
        log_val -= shape * math.log1p(b * y)
        if t:
            log_val += t * math.log(x) if x > 0 else -math.inf
        if s:
            log_val += s * math.log(y) if y > 0 else -math.inf
        return math.exp(log_val)

    return _quad(f, 0.0) / rate
