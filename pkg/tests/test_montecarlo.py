import dataclasses
import math

import numpy as np
import pytest
from scipy import stats

from rsma_sop.errors import ScenarioMismatch
from rsma_sop.model import (
    EveLayout,
    Scenario,
    SystemConfig,
    build_path_layout,
    derive_link_budget,
)
from rsma_sop.montecarlo import (
    CHUNK,
    McEstimate,
    beamformers,
    chunk_rng,
    estimate_sop,
    estimate_sop_fullvector,
    sample_gains,
)
from rsma_sop.specfun import gain_cdf

SCENARIO_II = EveLayout(Scenario.II, 2, 4, 0)


def test_same_inputs_reproduce_bit_exactly():
    cfg = SystemConfig()
    n = 2 * CHUNK + 123
    a = estimate_sop(cfg, SCENARIO_II, n, 99)
    b = estimate_sop(cfg, SCENARIO_II, n, 99)
    assert a == b
    assert estimate_sop(cfg, SCENARIO_II, n, 100).sop_hat != a.sop_hat


def test_worker_count_does_not_change_the_estimate():
    cfg = SystemConfig()
    n = 3 * CHUNK + 7
    serial = estimate_sop(cfg, SCENARIO_II, n, 5, workers=1)
    parallel = estimate_sop(cfg, SCENARIO_II, n, 5, workers=2)
    assert serial == parallel
    assert estimate_sop_fullvector(cfg, SCENARIO_II, n, 5, workers=2) == estimate_sop_fullvector(
        cfg, SCENARIO_II, n, 5, workers=1
    )


def test_std_err_is_the_binomial_formula():
    est = estimate_sop(SystemConfig(), SCENARIO_II, 50_000, 3)
    p = est.sop_hat
    assert est.std_err == math.sqrt(p * (1 - p) / est.n_trials)
    assert est.n_outage == round(p * est.n_trials)
    assert McEstimate.from_count(0, 10, 1).std_err == 0.0


def test_unreachable_rate_is_always_outage():
    cfg = dataclasses.replace(SystemConfig(), rate_th_common=50.0, rate_th_private=50.0)
    for eve in (EveLayout(Scenario.I, 0, 2, 0), SCENARIO_II, EveLayout(Scenario.III, 4, 1, 3)):
        assert estimate_sop(cfg, eve, 20_000, 1).sop_hat == 1.0


def test_scenario_1_without_private_power_is_outage():
    cfg = dataclasses.replace(SystemConfig(), tau_1=0.0)
    assert estimate_sop(cfg, EveLayout(Scenario.I, 0, 2, 0), 20_000, 1).sop_hat == 1.0


def test_scenario_4_eavesdropper_has_no_private_gain():
    cfg = SystemConfig()
    eve = EveLayout(Scenario.IV, 2, 0, 4)
    gains = sample_gains(eve, build_path_layout(cfg), chunk_rng(1, 0), 10_000)
    assert np.all(gains.x_ep1 == 0.0)
    assert np.all(gains.x_ep2 > 0.0)


def test_gain_norm_mean_and_law():
    cfg = SystemConfig(n_paths=8, n_common_paths=4)
    gains = sample_gains(SCENARIO_II, build_path_layout(cfg), chunk_rng(2024, 0), 1_000_000)
    assert abs(gains.x_1c.mean() - 4.0) <= 3 * (2 / 1e3)
    ks = stats.kstest(gains.x_1c, lambda v: gain_cdf(4, v)).statistic
    assert ks < 0.002


def test_fullvector_rejects_counts_without_a_basis_realization():
    cfg = SystemConfig(n_paths=8, n_common_paths=4)
    with pytest.raises(ScenarioMismatch):
        estimate_sop_fullvector(cfg, EveLayout(Scenario.IV, 2, 0, 6), 1000, 1)


def test_beamformer_columns_are_orthonormal():
    cfg = SystemConfig(n_antennas=50, n_paths=9, n_common_paths=3)
    W = np.hstack(beamformers(cfg))
    gram = W.conj().T @ W
    assert np.max(np.abs(gram - np.eye(W.shape[1]))) <= 1e-12


def test_single_path_fullvector_matches_norm_level():
    cfg = SystemConfig(n_antennas=8, n_paths=1, n_common_paths=1, tau_c=1.0, tau_1=0.0, tau_2=0.0, r_e=20.0)
    eve = EveLayout(Scenario.IV, 1, 0, 0)
    assert derive_link_budget(cfg).delta_1c > 0
    norm = estimate_sop(cfg, eve, 200_000, 8)
    full = estimate_sop_fullvector(cfg, eve, 200_000, 9)
    assert 0.05 < norm.sop_hat < 0.95
    assert abs(norm.sop_hat - full.sop_hat) <= 3 * math.hypot(norm.std_err, full.std_err)


def test_bad_trial_count_is_rejected():
    with pytest.raises(ValueError):
        estimate_sop(SystemConfig(), SCENARIO_II, 0, 1)
