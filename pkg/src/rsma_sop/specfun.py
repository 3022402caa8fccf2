"""Special functions needed by the closed-form SOP expressions.

The Meijer G-function here is restricted to the ``G^{2,1}_{1,2}`` pattern with
real parameters, evaluated by a numerical Mellin-Barnes contour.  The
bivariate Fox-H term is realized through its defining one-dimensional
integral (:func:`phi_integral`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError, UnsupportedParameters
from .quadrature import adaptive_reference, laguerre_nodes

LAGUERRE_ORDER = 64


def gamma_upper(a, x):
    """Upper incomplete gamma ``Gamma(a, x)`` (not regularized)."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(a <= 0) or np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("gamma_upper needs a > 0 and x >= 0")
    out = special.gammaincc(a, x) * special.gamma(a)
    return float(out) if out.ndim == 0 else out


def log_gamma_upper(a, x) -> float:
    """``log Gamma(a, x)`` for scalar ``a > 0``, ``x >= 0``; safe where Gamma(a, x) underflows.

    Integer ``a`` uses the finite sum ``Gamma(n, x) = (n-1)! e^-x sum_{k<n} x^k / k!``.
    """
    a, x = float(a), float(x)
    if a <= 0 or not x >= 0:
        raise DomainError("log_gamma_upper needs a > 0 and x >= 0")
    if a == int(a) and x > 0:
        k = np.arange(int(a))
        terms = k * math.log(x) - special.gammaln(k + 1.0)
        top = terms.max()
        return math.lgamma(a) - x + top + math.log(np.exp(terms - top).sum())
    return math.log(gamma_upper(a, x))


def _check_kappa(kappa):
    if int(kappa) != kappa or kappa < 1:
        raise DomainError(f"shape kappa must be a positive integer, got {kappa!r}")


def gain_pdf(kappa: int, x):
    """Density of a squared path-gain norm: unit-scale gamma with integer shape."""
    _check_kappa(kappa)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be nonnegative")
    with np.errstate(divide="ignore"):
        logp = (kappa - 1) * np.log(x) - x - math.lgamma(kappa)
    out = np.exp(logp) if kappa > 1 else np.exp(-x)
    return float(out) if out.ndim == 0 else out


def gain_cdf(kappa: int, x):
    """CDF ``1 - e^{-x} sum_{t<kappa} x^t/t!``, i.e. the regularized ``P(kappa, x)``."""
    _check_kappa(kappa)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be nonnegative")
    out = special.gammainc(kappa, x)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Laplace-type integrals


@dataclass(frozen=True)
class LaplacePowParams:
    """Parameters of ``int_0^inf e^{-p t} t^q (c t + 1)^{-r} dt``."""

    p: float
    q: float
    c: float
    r: float

    def __post_init__(self):
        if not self.p > 0:
            raise DomainError("p must be positive")
        if self.q < 0 or self.c < 0 or self.r < 0:
            raise DomainError("q, c, r must be nonnegative")


@dataclass(frozen=True)
class PhiParams:
    """Parameters of ``int_0^inf e^{-c1 y} y^c2 (c3 y + 1)^{-c4} (c5 y + 1)^{-c6} dy``."""

    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float

    def __post_init__(self):
        if not self.c1 > 0:
            raise DomainError("c1 must be positive")
        if self.c2 < 0 or int(self.c2) != self.c2:
            raise DomainError("c2 must be a nonnegative integer")
        for name in ("c3", "c4", "c5", "c6"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be nonnegative")


def _laguerre_transform(rate, power, log_factor, kinks, tol):
    """``int_0^inf e^{-rate y} y^power factor(y) dy`` for a smooth decaying factor.

    Substitutes ``y = x / rate`` and applies generalized Gauss-Laguerre rules of
    two orders.  If they disagree (the factor varies on a scale much shorter
    than ``1/rate``) the integral is redone adaptively in ``v = log y``, where
    every scale of the integrand is resolved equally well.  ``kinks`` are the
    values of ``y`` where the factor bends.
    """
    log_scale = -(power + 1.0) * math.log(rate)
    estimates = []
    for order in (LAGUERRE_ORDER, 2 * LAGUERRE_ORDER):
        table = laguerre_nodes(order, power)
        estimates.append(float(np.dot(table.weights, np.exp(log_factor(table.nodes / rate)))))
    lo, hi = estimates
    if abs(hi - lo) <= tol * abs(hi):
        return hi * math.exp(log_scale)

    def log_integrand(v):
        return (power + 1.0) * v - rate * math.exp(v) + float(log_factor(np.array([math.exp(v)]))[0])

    marks = sorted({math.log(max(power, 1.0) / rate)} | {math.log(k) for k in kinks if k > 0})
    v_lo = marks[0] - 40.0 / (power + 1.0)
    v_hi = math.log((power + 60.0) / rate) + 1.0
    marks = [m for m in marks if v_lo < m < v_hi]
    ref = max(log_integrand(m) for m in marks + [v_lo, v_hi])
    total = adaptive_reference(
        lambda v: math.exp(log_integrand(v) - ref), v_lo, v_hi, tol=tol, limit=2000, points=marks or None
    )
    return total * math.exp(ref)


def laplace_pow_integral(params: LaplacePowParams, tol: float = 1e-11) -> float:
    """``int_0^inf e^{-p t} t^q (c t + 1)^{-r} dt``."""
    p, q, c, r = params.p, params.q, params.c, params.r
    if c == 0.0 or r == 0.0:
        return math.exp(math.lgamma(q + 1.0) - (q + 1.0) * math.log(p))
    return _laguerre_transform(p, q, lambda y: -r * np.log1p(c * y), [1.0 / c], tol)


def phi_integral(params: PhiParams, tol: float = 1e-11) -> float:
    """``int_0^inf e^{-c1 y} y^c2 (c3 y + 1)^{-c4} (c5 y + 1)^{-c6} dy``."""
    c1, c2, c3, c4, c5, c6 = (
        params.c1,
        params.c2,
        params.c3,
        params.c4,
        params.c5,
        params.c6,
    )
    if (c3 == 0.0 or c4 == 0.0) and (c5 == 0.0 or c6 == 0.0):
        return math.exp(math.lgamma(c2 + 1.0) - (c2 + 1.0) * math.log(c1))
    kinks = [1.0 / c for c in (c3, c5) if c > 0]
    return _laguerre_transform(
        c1, c2, lambda y: -c4 * np.log1p(c3 * y) - c6 * np.log1p(c5 * y), kinks, tol
    )


# ---------------------------------------------------------------------------
# Meijer G^{2,1}_{1,2} by Mellin-Barnes contour

_STEP = 0.075  # trapezoid step along the contour; error ~ exp(-2*pi*margin/step)
_Y_MAX = 60.0
_DROP = 44.0  # truncate once |integrand| falls this far (in log) below its peak
_MARGIN = 0.5  # minimum distance of the contour from any pole


@lru_cache(maxsize=4096)
def _contour_table(a1: float, b1: float, b2: float, c: float, step: float = _STEP):
    y = np.arange(0.0, _Y_MAX, step)
    s = c + 1j * y
    lg = special.loggamma(b1 - s) + special.loggamma(b2 - s) + special.loggamma(1.0 - a1 + s)
    peak = lg.real[0]
    keep = lg.real - peak > -_DROP
    n = y.size if keep.all() else int(np.argmin(keep))
    g = np.exp(lg[:n] - peak) * step
    g[0] *= 0.5
    g.setflags(write=False)
    return g, peak


@lru_cache(maxsize=1024)
def _contour_lines(a1: float, b1: float, b2: float):
    lo, hi = a1 - 1.0, min(b1, b2)
    gap = hi - lo
    if gap <= 0:
        raise UnsupportedParameters(
            f"G^(2,1)_(1,2) poles overlap: a1={a1}, b1={b1}, b2={b2} leave no separating contour"
        )
    step = _STEP
    if gap > 2 * _MARGIN:
        count = max(2, int(math.ceil((gap - 2 * _MARGIN) / 0.5)) + 1)
        lines = np.linspace(lo + _MARGIN, hi - _MARGIN, count)
    else:
        lines = np.array([0.5 * (lo + hi)])
        # narrower pole gap: shrink the step with the margin to keep the same error
        step = _STEP * gap / (2 * _MARGIN)
    heights = special.loggamma(b1 - lines) + special.loggamma(b2 - lines)
    heights = (heights + special.loggamma(1.0 - a1 + lines)).real
    return lines, heights, step


def log_meijer_g_2112(z, a1: float, b1: float, b2: float):
    """Natural log of ``G^{2,1}_{1,2}(z | a1; b1, b2)`` for real parameters.

    The function is positive whenever the left poles (of ``Gamma(1-a1+s)``)
    and right poles (of ``Gamma(b1-s)Gamma(b2-s)``) are separated, which is
    the only case supported.  For each ``z`` the contour ``Re s = c`` is the
    candidate line minimizing ``|integrand(c)|``, i.e. the one closest to the
    saddle, which keeps the oscillatory cancellation small.
    """
    a1, b1, b2 = float(a1), float(b1), float(b2)
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    shape = z.shape
    z = np.atleast_1d(z).ravel()
    if np.any(~(z > 0)):
        raise DomainError("Meijer G argument must be positive")
    lines, heights, step = _contour_lines(a1, b1, b2)
    lz = np.log(z)
    pick = np.argmin(heights[None, :] + lines[None, :] * lz[:, None], axis=1)
    out = np.empty_like(lz)
    for ci in np.unique(pick):
        c = float(lines[ci])
        g, peak = _contour_table(a1, b1, b2, c, step)
        idx = pick == ci
        w = np.exp(1j * step * lz[idx])
        acc = np.full(w.shape, g[-1], dtype=complex)
        for gk in g[-2::-1]:
            acc = acc * w + gk
        re = acc.real
        if np.any(re <= 0):
            raise ConvergenceError("Meijer G contour sum lost all significant digits")
        out[idx] = np.log(re / np.pi) + c * lz[idx] + peak
    return float(out[0]) if scalar else out.reshape(shape)


def meijer_g_2112(z, a1: float, b1: float, b2: float):
    """``G^{2,1}_{1,2}(z | a1; b1, b2)`` defined by the Mellin-Barnes integral

    ``(1/2 pi i) int Gamma(b1 - s) Gamma(b2 - s) Gamma(1 - a1 + s) z^s ds``

    along a vertical line separating the two pole families.  Accepts scalar or
    array ``z``.
    """
    return np.exp(log_meijer_g_2112(z, a1, b1, b2))
