"""System configuration, path geometry, link budget and SINRs.

All physical inputs are held in :class:`SystemConfig`; dBm quantities are
converted to linear units once, in :func:`derive_link_budget`.  SINR
functions accept scalars or numpy arrays of gain realizations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ScenarioMismatch

TAU_SLACK = 1e-9  # tolerance on tau_c + tau_1 + tau_2 <= 1 for float grids


class Scenario(str, enum.Enum):
    """Which of U1's streams the eavesdropper's path window overlaps."""

    I = "I"  # private stream only
    II = "II"  # all private paths, part of the common paths
    III = "III"  # all common paths, part of the private paths
    IV = "IV"  # common stream only

    @classmethod
    def parse(cls, value) -> "Scenario":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise DomainError(f"unknown scenario {value!r}; expected I, II, III or IV") from None


@dataclass(frozen=True)
class SystemConfig:
    n_antennas: int = 50
    n_paths: int = 8
    n_common_paths: int = 4
    pathloss_exponent: float = 4.14
    carrier_freq_ghz: float = 28.0
    noise_power_dbm: float = -71.0
    tx_power_dbm: float = 10.0
    tau_c: float = 1.0 / 3.0
    tau_1: float = 1.0 / 3.0
    tau_2: float = 1.0 / 3.0
    r_1: float = 15.0
    r_2: float = 15.0
    r_e: float = 30.0
    rate_th_common: float = 0.1
    rate_th_private: float = 0.1

    def __post_init__(self):
        for name in ("n_antennas", "n_paths", "n_common_paths"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n_common_paths > self.n_paths:
            raise DomainError("n_common_paths cannot exceed n_paths")
        if self.n_antennas < 2 * self.n_paths - self.n_common_paths:
            raise DomainError(
                f"n_antennas={self.n_antennas} cannot hold both users' windows "
                f"(needs >= 2L - Lc = {2 * self.n_paths - self.n_common_paths})"
            )
        for name in ("pathloss_exponent", "carrier_freq_ghz", "r_1", "r_2", "r_e"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        for name in ("tau_c", "tau_1", "tau_2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
        if self.tau_c + self.tau_1 + self.tau_2 > 1.0 + TAU_SLACK:
            raise DomainError("tau_c + tau_1 + tau_2 must not exceed 1")
        for name in ("rate_th_common", "rate_th_private"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be nonnegative")
        for name in ("noise_power_dbm", "tx_power_dbm"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def n_private_paths(self) -> int:
        return self.n_paths - self.n_common_paths


@dataclass(frozen=True)
class EveLayout:
    scenario: Scenario
    l_ec: int
    l_e1: int
    l_e2: int

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario.parse(self.scenario))
        for name in ("l_ec", "l_e1", "l_e2"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise DomainError(f"{name} must be a nonnegative integer")
            object.__setattr__(self, name, int(value))

    def validate(self, cfg: SystemConfig) -> None:
        """Check the per-scenario overlap counts against the user layout."""
        L, Lc, Lp = cfg.n_paths, cfg.n_common_paths, cfg.n_private_paths
        ec, e1, e2 = self.l_ec, self.l_e1, self.l_e2
        s = self.scenario
        if s is Scenario.I:
            ok = ec == 0 and 1 <= e1 <= Lp and e2 == 0
        elif s is Scenario.II:
            ok = 1 <= ec <= Lc and e1 == Lp and e2 == 0 and ec + Lp <= L
        elif s is Scenario.III:
            ok = ec == Lc and 1 <= e1 <= Lp and 0 <= e2 <= Lp and ec + e1 + e2 <= L
        else:
            # The figure captions use L_e2 = L - L_ec, which can exceed L_p; the
            # closed form only needs the count, so only the total is bounded.
            ok = e1 == 0 and 1 <= ec <= Lc and ec + e2 <= L
        if not ok:
            raise ScenarioMismatch(
                f"eavesdropper counts (L_ec={ec}, L_e1={e1}, L_e2={e2}) are invalid for "
                f"Scenario {s.value} with L={L}, L_c={Lc}, L_p={Lp}"
            )

    @property
    def shapes(self) -> dict:
        return {"x_ec": self.l_ec, "x_ep1": self.l_e1, "x_ep2": self.l_e2}


@dataclass(frozen=True)
class PathLayout:
    """1-based basis-column index sets of both users' resolvable paths."""

    omega_1: tuple
    omega_2: tuple
    omega_c: tuple
    omega_1p: tuple
    omega_2p: tuple


def build_path_layout(cfg: SystemConfig) -> PathLayout:
    """Contiguous windows placed symmetrically about the basis midpoint.

    U1 occupies the left window and U2 the right one; they share the
    ``L_c`` middle indices.
    """
    L, Lp, Ns = cfg.n_paths, cfg.n_private_paths, cfg.n_antennas
    span = L + Lp
    if Ns < span:
        raise DomainError("n_antennas too small for the two path windows")
    mid = (Ns + 1) // 2
    start = mid - (span - 1) // 2
    start = min(max(start, 1), Ns - span + 1)
    omega_1 = tuple(range(start, start + L))
    omega_2 = tuple(range(start + Lp, start + Lp + L))
    common = tuple(sorted(set(omega_1) & set(omega_2)))
    return PathLayout(
        omega_1=omega_1,
        omega_2=omega_2,
        omega_c=common,
        omega_1p=tuple(i for i in omega_1 if i not in common),
        omega_2p=tuple(i for i in omega_2 if i not in common),
    )


def eve_index_sets(layout: PathLayout, eve: EveLayout):
    """Indices of the eavesdropper's paths inside Omega_c, Omega_1p and Omega_2p.

    The eavesdropper's window is contiguous: in Scenarios I and II it enters
    from U1's outer side, in III and IV it covers the common block and spills
    into the neighbouring private blocks.
    """
    c, p1, p2 = layout.omega_c, layout.omega_1p, layout.omega_2p
    ec, e1, e2 = eve.l_ec, eve.l_e1, eve.l_e2
    if ec > len(c) or e1 > len(p1) or e2 > len(p2):
        raise ScenarioMismatch(
            f"overlap counts (L_ec={ec}, L_e1={e1}, L_e2={e2}) exceed the path sets "
            f"(|Omega_c|={len(c)}, |Omega_1p|={len(p1)}, |Omega_2p|={len(p2)}); "
            "no basis-index realization exists"
        )
    if eve.scenario in (Scenario.I, Scenario.II):
        return c[:ec], p1[:e1], p2[:e2]
    if eve.scenario is Scenario.III:
        return c[len(c) - ec :], p1[len(p1) - e1 :], p2[:e2]
    return c[len(c) - ec :], (), p2[:e2]


@dataclass(frozen=True)
class LinkBudget:
    r0: float
    delta: float
    delta_1c: float
    delta_1: float
    delta_2: float
    delta_ec: float
    delta_e1: float
    delta_e2: float
    theta_c: float
    theta_p: float
    eta_1: float
    eta_2: float
    a_1: float
    a_2: float


def pathloss_intercept(carrier_freq_ghz: float) -> float:
    beta = 3.66 + 24.3 * math.log10(carrier_freq_ghz)
    return 10.0 ** (-beta / 10.0)


def derive_link_budget(cfg: SystemConfig) -> LinkBudget:
    r0 = pathloss_intercept(cfg.carrier_freq_ghz)
    rho = 10.0 ** ((cfg.tx_power_dbm - cfg.noise_power_dbm) / 10.0)
    delta = cfg.n_antennas * rho * r0 / cfg.n_paths
    alpha = cfg.pathloss_exponent
    g1, g2, ge = cfg.r_1**-alpha, cfg.r_2**-alpha, cfg.r_e**-alpha
    d1c, d1, d2 = delta * cfg.tau_c * g1, delta * cfg.tau_1 * g1, delta * cfg.tau_2 * g2
    dec, de1, de2 = delta * cfg.tau_c * ge, delta * cfg.tau_1 * ge, delta * cfg.tau_2 * ge
    theta_c = 2.0**cfg.rate_th_common
    theta_p = 2.0**cfg.rate_th_private
    eta_1 = (theta_c - 1.0) / d1c if d1c > 0 else math.inf
    eta_2 = theta_c * dec / d1c if d1c > 0 else math.inf
    a_1 = theta_p * (cfg.r_1 / cfg.r_e) ** alpha
    a_2 = (theta_p - 1.0) / d1 if d1 > 0 else (0.0 if theta_p == 1.0 else math.inf)
    return LinkBudget(
        r0=r0,
        delta=delta,
        delta_1c=d1c,
        delta_1=d1,
        delta_2=d2,
        delta_ec=dec,
        delta_e1=de1,
        delta_e2=de2,
        theta_c=theta_c,
        theta_p=theta_p,
        eta_1=eta_1,
        eta_2=eta_2,
        a_1=a_1,
        a_2=a_2,
    )


@dataclass(frozen=True)
class GainRealization:
    """Squared norms of the path-gain sub-vectors (scalars or equal-length arrays)."""

    x_1c: object
    x_1p: object
    x_ec: object
    x_ep1: object
    x_ep2: object

    def __post_init__(self):
        for name in ("x_1c", "x_1p", "x_ec", "x_ep1", "x_ep2"):
            if np.any(np.asarray(getattr(self, name)) < 0):
                raise DomainError(f"{name} must be nonnegative")


def sinr_user(cfg: SystemConfig, budget: LinkBudget, gains: GainRealization):
    """``(gamma_1c, gamma_1p)`` of U1: common stream decoded first, then SIC."""
    x1c, x1p = np.asarray(gains.x_1c, float), np.asarray(gains.x_1p, float)
    gamma_1p = budget.delta_1 * x1p
    gamma_1c = budget.delta_1c * x1c / (gamma_1p + 1.0)
    return _unwrap(gamma_1c), _unwrap(gamma_1p)


def sinr_eve(cfg: SystemConfig, budget: LinkBudget, eve: EveLayout, gains: GainRealization):
    """``(gamma_ec, gamma_ep1)`` of the eavesdropper in the given scenario."""
    for name, shape in eve.shapes.items():
        if shape == 0 and np.any(np.asarray(getattr(gains, name)) != 0):
            raise ScenarioMismatch(f"{name} must be 0 when its path count is 0 (Scenario {eve.scenario.value})")
    xec = np.asarray(gains.x_ec, float)
    xe1 = np.asarray(gains.x_ep1, float)
    xe2 = np.asarray(gains.x_ep2, float)
    s = eve.scenario
    if s is Scenario.I:
        gamma_ep1 = budget.delta_e1 * xe1
        gamma_ec = np.zeros_like(gamma_ep1)
    elif s is Scenario.II:
        gamma_ep1 = budget.delta_e1 * xe1
        gamma_ec = budget.delta_ec * xec / (gamma_ep1 + 1.0)
    elif s is Scenario.III:
        interference = budget.delta_e2 * xe2
        gamma_ec = budget.delta_ec * xec / (budget.delta_e1 * xe1 + interference + 1.0)
        gamma_ep1 = budget.delta_e1 * xe1 / (interference + 1.0)
    else:
        gamma_ec = budget.delta_ec * xec / (budget.delta_e2 * xe2 + 1.0)
        gamma_ep1 = np.zeros_like(gamma_ec)
    return _unwrap(gamma_ec), _unwrap(gamma_ep1)


def _unwrap(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x
