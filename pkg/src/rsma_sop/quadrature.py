"""Node/weight systems used by the closed-form SOP expressions.

Two fixed rules are needed:

* Gauss-Chebyshev nodes in the shifted form ``b_i = (1 + cos((2i-1)pi/2n)) / 2``
  on ``(0, 1)``; with weight ``pi*sqrt(b - b^2)/n`` they integrate smooth
  functions over ``[0, 1]``.
* Gauss-Laguerre nodes/weights for ``int_0^inf e^{-x} x^alpha f(x) dx``.

plus an adaptive integrator that every closed form is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, linalg

from .errors import ConvergenceError, DomainError

DEFAULT_ORDER = 50


@dataclass(frozen=True)
class QuadratureSpec:
    """Truncation orders of the series in the closed forms.

    ``order_I`` drives the Chebyshev sum of the Scenario II private-stream
    term, ``order_N`` the Chebyshev sum inside the Scenario III common-stream
    term, ``order_V`` its outer Laguerre sum, and ``order_K``/``order_D`` the
    two nested Laguerre sums of the last Scenario III term.
    """

    order_I: int = DEFAULT_ORDER
    order_N: int = DEFAULT_ORDER
    order_K: int = DEFAULT_ORDER
    order_V: int = DEFAULT_ORDER
    order_D: int = DEFAULT_ORDER

    def __post_init__(self):
        for name in ("order_I", "order_N", "order_K", "order_V", "order_D"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @classmethod
    def uniform(cls, order: int) -> "QuadratureSpec":
        return cls(order, order, order, order, order)

    def scaled(self, factor: int) -> "QuadratureSpec":
        return replace(
            self,
            order_I=self.order_I * factor,
            order_N=self.order_N * factor,
            order_K=self.order_K * factor,
            order_V=self.order_V * factor,
            order_D=self.order_D * factor,
        )


@dataclass(frozen=True)
class NodeTable:
    nodes: np.ndarray
    weights: np.ndarray
    log_weights: np.ndarray = None

    def __post_init__(self):
        if self.log_weights is None:
            with np.errstate(divide="ignore"):
                object.__setattr__(self, "log_weights", np.log(self.weights))

    def __len__(self):
        return self.nodes.size


def chebyshev_b_nodes(order: int) -> np.ndarray:
    """Shifted Chebyshev nodes ``(1 + cos((2i-1)pi/(2*order))) / 2``, i = 1..order."""
    if order < 1:
        raise DomainError("order must be >= 1")
    i = np.arange(1, order + 1)
    return 0.5 * (1.0 + np.cos((2 * i - 1) * np.pi / (2 * order)))


def chebyshev_b_weights(order: int) -> np.ndarray:
    """Weights pairing with :func:`chebyshev_b_nodes` for integrals over [0, 1]."""
    b = chebyshev_b_nodes(order)
    return np.pi / order * np.sqrt(b - b * b)


def _laguerre_eval(n: int, alpha: float, x: float):
    """Return ``(L_n, L_{n-1}, log_scale)`` of the generalized Laguerre polynomials.

    Values are rescaled to stay finite; both returned values carry the same
    factor ``exp(-log_scale)``.
    """
    # Difference form of the three-term recurrence: with D_j = L_j - L_{j-1},
    # j*D_j = (j-1+alpha)*D_{j-1} - x*L_{j-1}.  It avoids the cancellation the
    # plain recurrence suffers near the small roots.
    p2 = 1.0
    p1 = 1.0 + alpha - x
    d = p1 - p2
    log_scale = 0.0
    if n == 0:
        return 1.0, 0.0, 0.0
    for j in range(2, n + 1):
        d = ((j - 1 + alpha) * d - x * p1) / j
        p2 = p1
        p1 = p1 + d
        big = abs(p1)
        if big > 1e150:
            p1 /= big
            p2 /= big
            d /= big
            log_scale += math.log(big)
    return p1, p2, log_scale


def _newton_root(n: int, alpha: float, z: float) -> float:
    prev = math.inf
    for _ in range(100):
        p1, p2, _scale = _laguerre_eval(n, alpha, z)
        step = p1 / ((n * p1 - (n + alpha) * p2) / z)
        size = abs(z)
        # stop at the tolerance, or once steps stop shrinking at roundoff level
        if abs(step) <= 1e-15 * size or (abs(step) >= prev and abs(step) <= 1e-10 * size):
            return z - step
        z -= step
        prev = abs(step)
    raise ConvergenceError(f"Laguerre root of order {n} did not converge", estimate=z)


def _asymptotic_guesses(n: int, alpha: float) -> np.ndarray:
    # Stroud-Secrest style starting points; each guess extrapolates from the
    # two previously refined roots.
    nodes = np.empty(n)
    z = 0.0
    for i in range(n):
        if i == 0:
            z = (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * n + 1.8 * alpha)
        elif i == 1:
            z += (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * n)
        else:
            ai = i - 1
            z += (
                ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai))
                * (z - nodes[i - 2])
                / (1.0 + 0.3 * alpha)
            )
        z = _newton_root(n, alpha, z)
        nodes[i] = z
    return nodes


def _jacobi_matrix_guesses(n: int, alpha: float) -> np.ndarray:
    # Eigenvalues of the Laguerre Jacobi matrix (Golub-Welsch), Newton-polished.
    k = np.arange(n)
    diag = 2 * k + 1 + alpha
    off = np.sqrt(np.arange(1, n) * (np.arange(1, n) + alpha))
    guesses = linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    return np.array([_newton_root(n, alpha, z) for z in np.sort(guesses)])


def _laguerre_eval_many(n: int, alpha: float, x: np.ndarray):
    """Vectorized :func:`_laguerre_eval` over an array of points."""
    p2 = np.ones_like(x)
    p1 = 1.0 + alpha - x
    d = p1 - p2
    log_scale = np.zeros_like(x)
    for j in range(2, n + 1):
        d = ((j - 1 + alpha) * d - x * p1) / j
        p2 = p1
        p1 = p1 + d
        big = np.abs(p1)
        over = big > 1e150
        if over.any():
            f = np.where(over, big, 1.0)
            p1, p2, d = p1 / f, p2 / f, d / f
            log_scale += np.log(f)
    return p1, p2, log_scale


LARGE_ORDER = 256


def _large_order_nodes(n: int, alpha: float) -> np.ndarray:
    # Golub-Welsch guesses polished by Newton steps applied to all roots at once.
    k = np.arange(n)
    off = np.sqrt(np.arange(1, n) * (np.arange(1, n) + alpha))
    z = np.sort(linalg.eigh_tridiagonal(2 * k + 1 + alpha, off, eigvals_only=True))
    for _ in range(20):
        p1, p2, _scale = _laguerre_eval_many(n, alpha, z)
        step = p1 / ((n * p1 - (n + alpha) * p2) / z)
        z = z - step
        if np.all(np.abs(step) <= 1e-14 * np.abs(z)):
            break
    else:
        raise ConvergenceError(f"Laguerre roots of order {n} did not converge")
    return z


def _large_order_table(n: int, alpha: float) -> NodeTable:
    nodes = _large_order_nodes(n, alpha)
    if np.any(np.diff(nodes) <= 0):
        raise ConvergenceError(f"Laguerre roots of order {n} collapsed during Newton refinement")
    p1, p2, scale = _laguerre_eval_many(n, alpha, nodes)
    dp = (n * p1 - (n + alpha) * p2) / nodes
    log_w = math.lgamma(alpha + n) - math.lgamma(n) - math.log(n) - np.log(np.abs(dp * p2)) - 2.0 * scale
    weights = np.exp(log_w)
    for a in (nodes, weights, log_w):
        a.setflags(write=False)
    return NodeTable(nodes, weights, log_w)


@lru_cache(maxsize=256)
def _laguerre_table(order: int, alpha: float) -> NodeTable:
    n = order
    if n > LARGE_ORDER:
        return _large_order_table(n, alpha)
    try:
        nodes = _asymptotic_guesses(n, alpha)
        if np.any(np.diff(nodes) <= 0):
            raise ConvergenceError("Laguerre roots collapsed")
    except ConvergenceError:
        nodes = _jacobi_matrix_guesses(n, alpha)
        if np.any(np.diff(nodes) <= 0):
            raise ConvergenceError(f"Laguerre roots of order {n} collapsed during Newton refinement")
    lg_ratio = math.lgamma(alpha + n) - math.lgamma(n)
    log_w = np.empty(n)
    for i, z in enumerate(nodes):
        p1, p2, scale = _laguerre_eval(n, alpha, z)
        dp = (n * p1 - (n + alpha) * p2) / z
        # w = -Gamma(n+alpha) / (Gamma(n) * n * L_n'(x) * L_{n-1}(x))
        log_w[i] = lg_ratio - math.log(n) - math.log(abs(dp * p2)) - 2.0 * scale
    weights = np.exp(log_w)
    for a in (nodes, weights, log_w):
        a.setflags(write=False)
    return NodeTable(nodes, weights, log_w)


def laguerre_nodes(order: int, alpha: float = 0.0) -> NodeTable:
    """Gauss-Laguerre rule for ``int_0^inf x^alpha e^{-x} f(x) dx``.

    Nodes are the zeros of the generalized Laguerre polynomial of the given
    order.  For ``alpha = 0`` the weights sum to 1.  Tables are cached and
    returned read-only.
    """
    if order < 1 or int(order) != order:
        raise DomainError("order must be a positive integer")
    if alpha <= -1.0:
        raise DomainError("alpha must exceed -1")
    return _laguerre_table(int(order), float(alpha))


def adaptive_reference(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    abs_tol: float = 0.0,
    limit: int = 500,
    points=None,
) -> float:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[lo, hi]``.

    ``hi`` may be ``math.inf``; QUADPACK then maps ``[lo, inf)`` onto
    ``(0, 1]`` through ``x = lo + (1 - s)/s``.  Raises
    :class:`ConvergenceError` (with the best estimate attached) if the error
    estimate stays above ``max(tol*|I|, abs_tol)``.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if hi == lo:
        return 0.0
    kwargs = dict(epsabs=abs_tol, epsrel=tol, limit=limit, full_output=1)
    if points is not None and math.isfinite(hi):
        kwargs["points"] = points
    res = integrate.quad(f, lo, hi, **kwargs)
    value, err = res[0], res[1]
    # len(res) > 3 means QUADPACK returned ier > 0 together with a message
    failed = len(res) > 3 and err > max(tol * abs(value), abs_tol)
    if not math.isfinite(value) or failed:
        raise ConvergenceError(
            f"adaptive quadrature on [{lo}, {hi}] reached error {err:.3g}", estimate=value, error=err
        )
    return value
