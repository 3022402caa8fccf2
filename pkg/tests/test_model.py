import dataclasses
import math

import numpy as np
import pytest

from rsma_sop.errors import DomainError, ScenarioMismatch
from rsma_sop.model import (
    EveLayout,
    GainRealization,
    Scenario,
    SystemConfig,
    build_path_layout,
    derive_link_budget,
    eve_index_sets,
    pathloss_intercept,
    sinr_eve,
    sinr_user,
)


def test_fig2_layout():
    lay = build_path_layout(SystemConfig(n_antennas=50, n_paths=8, n_common_paths=4))
    assert len(lay.omega_c) == 4 and len(lay.omega_1p) == len(lay.omega_2p) == 4
    assert min(lay.omega_1) >= 1 and max(lay.omega_2) <= 50
    assert set(lay.omega_1p).isdisjoint(lay.omega_2p)


def test_full_overlap_layout():
    L = 5
    lay = build_path_layout(SystemConfig(n_antennas=L, n_paths=L, n_common_paths=L))
    assert lay.omega_1 == lay.omega_2
    assert lay.omega_1p == lay.omega_2p == ()


def test_small_layout():
    lay = build_path_layout(SystemConfig(n_antennas=9, n_paths=5, n_common_paths=3))
    assert len(lay.omega_c) == 3
    assert len(lay.omega_1p) == len(lay.omega_2p) == 2
    assert set(lay.omega_1p).isdisjoint(lay.omega_2p)


@pytest.mark.parametrize(
    "changes",
    [
        {"n_antennas": 10},
        {"n_common_paths": 9},
        {"tau_c": 0.6, "tau_1": 0.3, "tau_2": 0.2},
        {"tau_1": -0.1},
        {"r_e": 0.0},
        {"rate_th_common": -0.1},
        {"n_paths": 2.5},
    ],
)
def test_invalid_configs_rejected(changes):
    with pytest.raises(DomainError):
        dataclasses.replace(SystemConfig(), **changes)


def test_pathloss_intercept_at_28ghz():
    beta = 3.66 + 24.3 * math.log10(28.0)
    assert beta == pytest.approx(38.827, abs=2e-3)
    assert pathloss_intercept(28.0) == pytest.approx(1.309e-4, rel=2e-3)


def test_link_budget_examples():
    b = derive_link_budget(SystemConfig(rate_th_common=0.1, rate_th_private=0.1, r_1=15, r_e=30))
    assert b.a_1 == pytest.approx(2**0.1 * 0.5**4.14, rel=1e-12)
    assert b.a_1 == pytest.approx(0.0607, abs=1e-4)
    b0 = derive_link_budget(SystemConfig(rate_th_private=0.0))
    assert b0.theta_p == 1.0 and b0.a_2 == 0.0


def test_user_sinr_examples():
    cfg = SystemConfig()
    b = derive_link_budget(cfg)
    g1c, _ = sinr_user(cfg, b, GainRealization(0.0, 2.0, 0.0, 1.0, 0.0))
    assert g1c == 0.0
    cfg0 = dataclasses.replace(cfg, tau_1=0.0)
    b0 = derive_link_budget(cfg0)
    g1c, g1p = sinr_user(cfg0, b0, GainRealization(3.0, 2.0, 0.0, 1.0, 0.0))
    assert g1p == 0.0 and g1c == pytest.approx(b0.delta_1c * 3.0, rel=1e-15)


def test_user_sinr_matches_direct_formula():
    rng = np.random.default_rng(1)
    cfg = SystemConfig(tx_power_dbm=17.0)
    b = derive_link_budget(cfg)
    x = rng.gamma(4.0, size=(2, 1000))
    g1c, g1p = sinr_user(cfg, b, GainRealization(x[0], x[1], 0.0, 0.0, 0.0))
    np.testing.assert_array_equal(g1p, b.delta_1 * x[1])
    np.testing.assert_allclose(g1c, b.delta_1c * x[0] / (b.delta_1 * x[1] + 1.0), rtol=1e-15)


def test_eve_sinr_scenarios():
    cfg = SystemConfig()
    b = derive_link_budget(cfg)
    g = GainRealization(1.0, 1.0, 0.0, 2.0, 0.0)
    gec, _ = sinr_eve(cfg, b, EveLayout(Scenario.I, 0, 2, 0), g)
    assert gec == 0.0

    g2 = GainRealization(1.0, 1.0, 1.5, 2.0, 0.0)
    ii = sinr_eve(cfg, b, EveLayout(Scenario.II, 2, 4, 0), g2)
    iii = sinr_eve(cfg, b, EveLayout(Scenario.III, 4, 1, 3), g2)
    assert ii == pytest.approx(iii, rel=1e-15)

    g3 = GainRealization(1.0, 1.0, 1.5, 2.0, 0.7)
    iii = sinr_eve(cfg, b, EveLayout(Scenario.III, 4, 1, 3), g3)
    assert iii[0] <= ii[0]

    gec, _ = sinr_eve(cfg, b, EveLayout(Scenario.IV, 2, 0, 6), GainRealization(1.0, 1.0, 1.5, 0.0, 0.0))
    assert gec == pytest.approx(b.delta_ec * 1.5, rel=1e-15)


def test_eve_gain_must_vanish_with_zero_count():
    cfg = SystemConfig()
    with pytest.raises(ScenarioMismatch):
        sinr_eve(cfg, derive_link_budget(cfg), EveLayout(Scenario.IV, 2, 0, 2), GainRealization(1, 1, 1, 0.5, 1))


@pytest.mark.parametrize(
    "eve",
    [
        EveLayout(Scenario.I, 1, 2, 0),
        EveLayout(Scenario.II, 2, 3, 0),
        EveLayout(Scenario.III, 3, 1, 1),
        EveLayout(Scenario.IV, 0, 0, 2),
    ],
)
def test_layout_validation(eve):
    with pytest.raises(ScenarioMismatch):
        eve.validate(SystemConfig())


def test_eve_index_sets_inside_path_sets():
    cfg = SystemConfig()
    lay = build_path_layout(cfg)
    ec, e1, e2 = eve_index_sets(lay, EveLayout(Scenario.III, 4, 1, 3))
    assert set(ec) <= set(lay.omega_c) and set(e1) <= set(lay.omega_1p) and set(e2) <= set(lay.omega_2p)
    assert (len(ec), len(e1), len(e2)) == (4, 1, 3)
    with pytest.raises(ScenarioMismatch):
        eve_index_sets(lay, EveLayout(Scenario.IV, 2, 0, 6))
