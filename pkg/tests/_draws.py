"""Random valid configurations and term indices shared by the test modules."""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from rsma_sop.analytic._common import THETA_OFFSET, Ctx
from rsma_sop.model import EveLayout, Scenario, SystemConfig, derive_link_budget

TERM_FAMILIES = (
    ("Delta_2", Scenario.II),
    ("Delta_3", Scenario.II),
    ("Delta_5", Scenario.III),
    ("Delta_6", Scenario.III),
    ("Xi_1", Scenario.III),
    ("nabla_1", Scenario.III),
    ("Xi_2", Scenario.III),
    ("nabla_2", Scenario.III),
    ("Xi_3", Scenario.III),
    ("Delta_7", Scenario.III),
    ("Delta_8", Scenario.III),
    ("Delta_9", Scenario.IV),
    ("Delta_10", Scenario.IV),
)


def random_system(rng: np.random.Generator, min_private: int = 1) -> SystemConfig:
    L = int(rng.integers(3, 10))
    Lc = int(rng.integers(1, L - min_private + 1))
    tau_c = rng.uniform(0.1, 0.8)
    split = rng.uniform(0.2, 0.8)
    return SystemConfig(
        n_paths=L,
        n_common_paths=Lc,
        tx_power_dbm=float(rng.uniform(-10.0, 30.0)),
        r_1=float(rng.uniform(10.0, 30.0)),
        r_2=float(rng.uniform(10.0, 30.0)),
        r_e=float(rng.uniform(15.0, 40.0)),
        tau_c=tau_c,
        tau_1=(1.0 - tau_c) * split,
        tau_2=(1.0 - tau_c) * (1.0 - split),
        rate_th_common=float(rng.uniform(0.05, 0.5)),
        rate_th_private=float(rng.uniform(0.05, 0.5)),
    )


def random_layout(rng: np.random.Generator, cfg: SystemConfig, scenario: Scenario) -> EveLayout:
    L, Lc, Lp = cfg.n_paths, cfg.n_common_paths, cfg.n_private_paths
    if scenario is Scenario.I:
        return EveLayout(scenario, 0, int(rng.integers(1, Lp + 1)), 0)
    if scenario is Scenario.II:
        return EveLayout(scenario, int(rng.integers(1, Lc + 1)), Lp, 0)
    if scenario is Scenario.III:
        e1 = int(rng.integers(1, Lp))
        return EveLayout(scenario, Lc, e1, int(rng.integers(1, Lp - e1 + 1)))
    ec = int(rng.integers(1, Lc + 1))
    return EveLayout(scenario, ec, 0, int(rng.integers(0, L - ec + 1)))


def random_case(rng: np.random.Generator, scenario: Scenario):
    cfg = random_system(rng, min_private=2 if scenario is Scenario.III else 1)
    eve = random_layout(rng, cfg, scenario)
    budget = derive_link_budget(cfg)
    theta_p = budget.theta_p if budget.theta_p > 1.0 else 1.0 + THETA_OFFSET
    return cfg, eve, budget, Ctx.build(cfg, eve, budget, theta_p=theta_p)


def random_index(rng: np.random.Generator, ctx: Ctx, term: str) -> tuple:
    """A valid closed-form index for ``term`` (the ranges of the SOP sums)."""

    def below(n):
        return int(rng.integers(0, n))

    Lc, Lp, Lec, Le1 = ctx.Lc, ctx.Lp, ctx.Lec, ctx.Le1
    t = below(Lec) if Lec else 0
    m = below(t + 1)
    z = float(math.exp(rng.uniform(math.log(0.05), math.log(30.0))))
    if term == "Delta_2":
        return (below(Lc),)
    if term == "Delta_3":
        return (t, m, below(m + Lc), below(Lc + 1))
    if term == "Delta_5":
        return ()
    if term == "Delta_6":
        return (below(Le1),)
    if term == "Xi_1":
        t1 = below(Le1)
        return (t1, below(Lc), below(Lp), below(t1 + 1))
    if term == "nabla_1":
        return (z, t, m, below(Lc))
    if term in ("Xi_2",):
        return (t, m, below(Lc))
    if term == "nabla_2":
        return (z, t, m, below(m + Le1), below(Lc))
    if term == "Xi_3":
        return (t, m, below(m + Le1), below(Lc))
    if term == "Delta_7":
        return (t, m)
    if term == "Delta_8":
        return (t, m, below(m + Le1))
    if term in ("Delta_9", "Delta_10"):
        t4 = below(Lc)
        s = below(Lec)
        return (t4, below(t4 + 1), s, below(s + 1))
    raise KeyError(term)


def with_scenario(cfg: SystemConfig, **changes) -> SystemConfig:
    return dataclasses.replace(cfg, **changes)
