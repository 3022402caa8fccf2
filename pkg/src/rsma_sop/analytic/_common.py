"""Shared pieces of the scenario evaluators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from ..model import EveLayout, LinkBudget, SystemConfig

RANGE_SLACK = 1e-9  # scp outside [-slack, 1 + slack] is an error, not a clamp
THETA_OFFSET = 1e-6  # Theta_p = 1 is evaluated at 1 + THETA_OFFSET


@dataclass
class SecrecyResult:
    scp: float
    sop: float
    term_diagnostics: dict = field(default_factory=dict)
    converged: bool = True
    flags: tuple = ()


@dataclass(frozen=True)
class Ctx:
    """Path counts and link-budget scalars in the notation of the closed forms."""

    Lc: int
    Lp: int
    Lec: int
    Le1: int
    Le2: int
    d1c: float
    d1: float
    dec: float
    de1: float
    de2: float
    th_c: float
    th_p: float
    eta1: float
    eta2: float

    @property
    def mu(self) -> float:
        return self.eta1 + 1.0 / self.d1

    @classmethod
    def build(cls, cfg: SystemConfig, eve: EveLayout, budget: LinkBudget, theta_p=None) -> "Ctx":
        return cls(
            Lc=cfg.n_common_paths,
            Lp=cfg.n_private_paths,
            Lec=eve.l_ec,
            Le1=eve.l_e1,
            Le2=eve.l_e2,
            d1c=budget.delta_1c,
            d1=budget.delta_1,
            dec=budget.delta_ec,
            de1=budget.delta_e1,
            de2=budget.delta_e2,
            th_c=budget.theta_c,
            th_p=budget.theta_p if theta_p is None else theta_p,
            eta1=budget.eta_1,
            eta2=budget.eta_2,
        )


def lfact(n) -> float:
    """log(n!) for n >= 0 (also accepts non-integers through lgamma)."""
    return math.lgamma(n + 1.0)


def xlogy(a, y) -> float:
    """``a * log(y)`` with the convention ``0 * log(0) = 0``."""
    if a == 0:
        return 0.0
    if y == 0.0:
        return -math.inf
    return a * math.log(y)


def log_rising(n: int, kappa: int) -> float:
    """``log((n + kappa - 1)! / (kappa - 1)!)``; for ``kappa = 0`` the gain is
    identically zero, so only the ``n = 0`` term survives (value 1)."""
    if kappa == 0:
        return 0.0 if n == 0 else -math.inf
    return lfact(n + kappa - 1) - lfact(kappa - 1)


class SignedSum:
    """Accumulates ``sum sign_i * exp(log_i)`` without overflow.

    Terms are rescaled by the largest magnitude and summed with
    ``math.fsum`` in descending-magnitude order, so alternating sums lose only
    the digits their cancellation genuinely costs.
    """

    def __init__(self):
        self._signs = []
        self._logs = []

    def add(self, sign: float, log_mag: float):
        if sign != 0 and log_mag != -math.inf:
            self._signs.append(sign)
            self._logs.append(log_mag)

    def add_array(self, sign: float, log_mags):
        log_mags = np.asarray(log_mags, float).ravel()
        log_mags = log_mags[np.isfinite(log_mags)]
        self._signs.extend([sign] * log_mags.size)
        self._logs.extend(log_mags.tolist())

    def add_value(self, value: float):
        if value != 0.0:
            self.add(math.copysign(1.0, value), math.log(abs(value)))

    def value(self) -> float:
        if not self._logs:
            return 0.0
        logs = np.asarray(self._logs)
        top = float(logs.max())
        order = np.argsort(-logs)
        scaled = np.asarray(self._signs)[order] * np.exp(logs[order] - top)
        total = math.fsum(scaled.tolist())
        if total == 0.0:
            return 0.0
        return math.copysign(math.exp(math.log(abs(total)) + top), total)

    def magnitude(self) -> float:
        """Largest single term, a yardstick for cancellation."""
        return math.exp(max(self._logs)) if self._logs else 0.0


def logsumexp(a, axis=None):
    """log(sum(exp(a))) along ``axis``; a lean replacement for the scipy one,
    which dominates runtime on the small arrays used here."""
    a = np.asarray(a, dtype=float)
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True)) + m
    if axis is None:
        return out.reshape(())[()]
    return np.squeeze(out, axis=axis)


def finalize(scp: float, diagnostics: dict, flags=(), converged=True) -> SecrecyResult:
    if not math.isfinite(scp):
        raise ArithmeticError(f"secrecy connection probability is not finite ({scp})")
    if scp < -RANGE_SLACK or scp > 1.0 + RANGE_SLACK:
        raise ArithmeticError(f"secrecy connection probability {scp:.3e} left [0, 1] beyond tolerance")
    raw = scp
    scp = min(max(scp, 0.0), 1.0)
    diagnostics = dict(diagnostics)
    diagnostics["scp_unclamped"] = raw
    return SecrecyResult(scp=scp, sop=1.0 - scp, term_diagnostics=diagnostics, converged=converged, flags=tuple(flags))


def zero_result(reason: str) -> SecrecyResult:
    return SecrecyResult(scp=0.0, sop=1.0, term_diagnostics={"degenerate": reason}, converged=True)


def chebyshev_rule(order: int):
    """Shifted Chebyshev nodes on (0, 1) and their ``pi*sqrt(b - b^2)/order`` weights."""
    from ..quadrature import chebyshev_b_nodes

    if order < 1:
        raise DomainError("order must be >= 1")
    b = chebyshev_b_nodes(order)
    return b, np.pi / order * np.sqrt(b - b * b)


def chebyshev_endpoint_log_weight(order: int) -> float:
    """log of ``pi^2 / (48 order^2)``, the endpoint correction of :func:`chebyshev_rule`.

    The rule is the midpoint rule in ``theta`` with ``b = (1 + cos theta)/2``,
    whose leading error gives
    ``int_0^1 f = sum w_i f(b_i) - pi^2/(48 N^2) (f(0) + f(1)) + O(N^-4)``.
    Subtracting the endpoint term turns the O(N^-2) convergence of integrands
    that do not vanish at the ends into O(N^-4).
    """
    return math.log(math.pi**2 / (48.0 * order * order))


def log_endpoint_corrected(log_rule: float, log_endpoint: float) -> float:
    """log of ``exp(log_rule) - exp(log_endpoint)``, falling back to the plain rule
    if the correction would not leave a positive value (far outside its regime)."""
    d = 1.0 - math.exp(log_endpoint - log_rule)
    return log_rule + math.log(d) if d > 0.0 else log_rule
