import dataclasses
import math

import numpy as np
import pytest
from _draws import random_layout, random_system
from scipy import special

from rsma_sop import presets
from rsma_sop.analytic import run_term_checks, scp_scenario_1, scp_scenario_2, sop
from rsma_sop.analytic.scenario_1 import scp_closed_form
from rsma_sop.errors import ScenarioMismatch
from rsma_sop.model import EveLayout, Scenario, SystemConfig, derive_link_budget
from rsma_sop.montecarlo import estimate_sop


def test_scp_and_sop_are_complementary(fig2):
    for cfg, eve in fig2.values():
        res = sop(cfg, eve)
        assert res.scp + res.sop == pytest.approx(1.0, abs=1e-15)
        assert res.converged and not res.flags


def test_scenario_1_without_private_power_is_outage():
    cfg = dataclasses.replace(SystemConfig(), tau_1=0.0)
    res = sop(cfg, EveLayout(Scenario.I, 0, 2, 0))
    assert res.scp == 0.0 and res.sop == 1.0


def test_scenario_1_far_eavesdropper_limit():
    cfg = dataclasses.replace(SystemConfig(), r_e=1e9)
    b = derive_link_budget(cfg)
    res = sop(cfg, EveLayout(Scenario.I, 0, 2, 0))
    assert res.scp == pytest.approx(special.gammaincc(cfg.n_private_paths, b.a_2), rel=1e-9)


def test_scenario_1_zero_thresholds():
    cfg = dataclasses.replace(SystemConfig(), rate_th_common=0.0, rate_th_private=0.0)
    a1 = (cfg.r_1 / cfg.r_e) ** cfg.pathloss_exponent
    res = sop(cfg, EveLayout(Scenario.I, 0, 2, 0))
    assert res.sop == pytest.approx(1.0 - scp_closed_form(cfg.n_private_paths, 2, a1, 0.0), abs=1e-14)


@pytest.mark.parametrize("scenario,layout", [(Scenario.II, (2, 4, 0)), (Scenario.IV, (2, 0, 6))])
def test_no_common_power_is_outage(scenario, layout):
    cfg = dataclasses.replace(SystemConfig(), tau_c=0.0, tau_1=0.5, tau_2=0.5)
    assert sop(cfg, EveLayout(scenario, *layout)).sop == 1.0


def test_scenario_3_without_u2_overlap_reduces_to_scenario_2():
    for P in (0.0, 10.0, 20.0):
        cfg = dataclasses.replace(SystemConfig(), tx_power_dbm=P)
        iii = sop(cfg, EveLayout(Scenario.III, 4, 4, 0))
        ii = sop(cfg, EveLayout(Scenario.II, 4, 4, 0))
        assert iii.sop == pytest.approx(ii.sop, abs=1e-6)


def test_evaluator_rejects_other_scenario():
    cfg = SystemConfig()
    b = derive_link_budget(cfg)
    with pytest.raises(ScenarioMismatch):
        scp_scenario_1(cfg, EveLayout(Scenario.II, 2, 4, 0), b)
    with pytest.raises(ScenarioMismatch):
        scp_scenario_2(cfg, EveLayout(Scenario.I, 0, 2, 0), b)


@pytest.mark.parametrize("key", ["a", "b", "c", "d"])
def test_fig2_points_match_monte_carlo_1e7(fig2, key):
    cfg, eve = fig2[key]
    for P in (0.0, 10.0, 20.0):
        point = dataclasses.replace(cfg, tx_power_dbm=P)
        est = estimate_sop(point, eve, 10_000_000, 99)
        bound = 3.0 * est.std_err + (0.0 if key == "a" else 5e-3)
        assert abs(sop(point, eve).sop - est.sop_hat) <= bound, (P, est)


def test_fig3_common_paths_hurt_scenario_1():
    run = presets.load_preset("fig3a")
    values = {}
    for Lc in (3, 6):
        cfg = dataclasses.replace(run.system, n_common_paths=Lc, tx_power_dbm=20.0)
        values[Lc] = sop(cfg, run.eve_layout(cfg)).sop
        est = estimate_sop(cfg, run.eve_layout(cfg), 1_000_000, 5)
        assert abs(values[Lc] - est.sop_hat) <= 3 * est.std_err + 1e-4
    assert values[6] > values[3]


def test_scenario_1_closer_user_is_safer(fig2):
    cfg, eve = fig2["a"]
    for P in np.arange(-10.0, 41.0, 5.0):
        near = sop(dataclasses.replace(cfg, r_1=15.0, tx_power_dbm=float(P)), eve).sop
        far = sop(dataclasses.replace(cfg, r_1=30.0, tx_power_dbm=float(P)), eve).sop
        assert near <= far + 1e-12


def test_term_checks_attach_diagnostics(fig2):
    cfg, eve = fig2["b"]
    res = sop(cfg, eve, check_terms=True)
    checks = res.term_diagnostics["term_checks"]
    assert checks and all(c["rel_err"] <= 1e-6 for c in checks)
    assert "term_disagreement" not in res.flags
    assert all(c.rel_err <= 1e-6 for c in run_term_checks(cfg, EveLayout(Scenario.IV, 2, 0, 6), derive_link_budget(cfg)))


def test_scp_stays_in_range_on_random_configs():
    rng = np.random.default_rng(31)
    scenarios = list(Scenario)
    for i in range(1000):
        scenario = scenarios[i % 4]
        cfg = random_system(rng, min_private=2 if scenario is Scenario.III else 1)
        eve = random_layout(rng, cfg, scenario)
        res = sop(cfg, eve)
        raw = res.term_diagnostics.get("scp_unclamped", res.scp)
        assert -1e-9 <= raw <= 1 + 1e-9, (cfg, eve, raw)


def test_analytic_inside_monte_carlo_interval_on_random_configs():
    rng = np.random.default_rng(77)
    scenarios = list(Scenario)
    hits = 0
    for i in range(200):
        scenario = scenarios[i % 4]
        cfg = random_system(rng, min_private=2 if scenario is Scenario.III else 1)
        eve = random_layout(rng, cfg, scenario)
        est = estimate_sop(cfg, eve, 200_000, i)
        hits += abs(sop(cfg, eve).sop - est.sop_hat) <= 2.576 * est.std_err + 5e-3
    assert hits >= 190


def test_high_power_scenario_3_reports_capped_orders():
    cfg = dataclasses.replace(SystemConfig(), tx_power_dbm=70.0)
    res = sop(cfg, EveLayout(Scenario.III, 4, 1, 3))
    assert 0.0 <= res.sop <= 1.0
    if any(f.endswith("_capped") for f in res.flags):
        assert not res.converged
    assert math.isfinite(res.term_diagnostics["order_N_used"])
