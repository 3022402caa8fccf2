"""Monte Carlo estimates of the secrecy outage probability.

Two samplers are provided.  The norm-level sampler draws the squared path-gain
norms directly as unit-scale gamma variates; the full-vector sampler draws the
complex path gains on the basis, builds the channels, applies the
column-selection beamformers and measures the received powers.  Both feed the
same outage test.

Random streams: trials are cut into chunks of ``CHUNK`` (the last one may be
shorter).  Chunk ``j`` draws from ``PCG64(SeedSequence(seed, spawn_key=(j,)))``,
i.e. the ``j``-th child that ``SeedSequence(seed).spawn`` would produce, and
contributes an integer outage count.  The estimate therefore depends only on
``(config, seed, n_trials)``, not on how chunks are spread over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import DomainError
from .model import (
    EveLayout,
    GainRealization,
    LinkBudget,
    PathLayout,
    Scenario,
    SystemConfig,
    build_path_layout,
    derive_link_budget,
    eve_index_sets,
    sinr_eve,
    sinr_user,
)

CHUNK = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    sop_hat: float
    n_trials: int
    std_err: float
    seed: int
    n_outage: int = 0

    @classmethod
    def from_count(cls, n_outage: int, n_trials: int, seed: int) -> "McEstimate":
        p = n_outage / n_trials
        return cls(p, n_trials, math.sqrt(p * (1.0 - p) / n_trials), seed, n_outage)


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _gamma(rng: np.random.Generator, shape: int, size):
    if shape == 0:
        return np.zeros(size)
    return rng.standard_gamma(shape, size)


def sample_gains(
    eve: EveLayout, layout: PathLayout, rng: np.random.Generator, size: int | None = None
) -> GainRealization:
    """Squared gain norms; each is a sum of ``kappa`` unit-power |CN(0,1)|^2 terms."""
    return GainRealization(
        x_1c=_gamma(rng, len(layout.omega_c), size),
        x_1p=_gamma(rng, len(layout.omega_1p), size),
        x_ec=_gamma(rng, eve.l_ec, size),
        x_ep1=_gamma(rng, eve.l_e1, size),
        x_ep2=_gamma(rng, eve.l_e2, size),
    )


def outage(cfg: SystemConfig, budget: LinkBudget, scenario: Scenario, g1c, g1p, gec, gep1):
    """Boolean outage indicator per trial.

    A stream is in secrecy outage when log2((1+gamma_user)/(1+gamma_eve)) <= R_th.
    Scenario I tests only the private stream, IV only the common one.
    """
    common = np.log2((1.0 + g1c) / (1.0 + gec)) <= cfg.rate_th_common
    private = np.log2((1.0 + g1p) / (1.0 + gep1)) <= cfg.rate_th_private
    if scenario is Scenario.I:
        return private
    if scenario is Scenario.IV:
        return common
    return common | private


def _count_norm(cfg: SystemConfig, eve: EveLayout, seed: int, job) -> int:
    index, size = job
    budget = derive_link_budget(cfg)
    gains = sample_gains(eve, build_path_layout(cfg), chunk_rng(seed, index), size)
    g1c, g1p = sinr_user(cfg, budget, gains)
    gec, gep1 = sinr_eve(cfg, budget, eve, gains)
    return int(np.count_nonzero(outage(cfg, budget, eve.scenario, g1c, g1p, gec, gep1)))


def dft_basis(n: int) -> np.ndarray:
    """Unitary DFT matrix; column ``k`` (0-based) is basis direction ``k + 1``."""
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / math.sqrt(n)


def beamformers(cfg: SystemConfig, layout: PathLayout | None = None):
    """``(w_c, w_1, w_2)``: basis columns selected by Omega_c, Omega_1p, Omega_2p."""
    layout = layout or build_path_layout(cfg)
    U = dft_basis(cfg.n_antennas)

    def select(indices):
        return U[:, [i - 1 for i in indices]]

    return select(layout.omega_c), select(layout.omega_1p), select(layout.omega_2p)


def _stream_snrs(rng, U_h_rows, W, split, size, scale, rho, taus):
    """Received SNR of each stream, ``P tau ||h w||^2 / sigma^2``.

    ``h = scale * g U^H`` with ``g`` CN(0, 1) on the active rows only, so
    ``h W = scale * g (U^H W)[rows]``; the product is formed once per chunk.
    """
    n = U_h_rows.shape[0]
    g = (rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))) / math.sqrt(2.0)
    hw = scale * (g @ (U_h_rows @ W))
    out = []
    for block, tau in zip(np.split(hw, split, axis=1), taus):
        if block.shape[1] == 0 or tau == 0.0:
            out.append(np.zeros(size))
        else:
            out.append(rho * tau * np.sum(block.real**2 + block.imag**2, axis=1))
    return out


def _count_fullvector(cfg: SystemConfig, eve: EveLayout, seed: int, job) -> int:
    index, size = job
    rng = chunk_rng(seed, index)
    budget = derive_link_budget(cfg)
    layout = build_path_layout(cfg)
    ec, e1, e2 = eve_index_sets(layout, eve)
    eve_window = tuple(ec) + tuple(e1) + tuple(e2)
    U_h = dft_basis(cfg.n_antennas).conj().T
    w_c, w_1, w_2 = beamformers(cfg, layout)
    W = np.hstack([w_c, w_1, w_2])
    split = [w_c.shape[1], w_c.shape[1] + w_1.shape[1]]
    rho = 10.0 ** ((cfg.tx_power_dbm - cfg.noise_power_dbm) / 10.0)
    taus = (cfg.tau_c, cfg.tau_1, cfg.tau_2)
    L, Ns, alpha = cfg.n_paths, cfg.n_antennas, cfg.pathloss_exponent

    def snrs(window, r):
        scale = math.sqrt(Ns * budget.r0 * r**-alpha / L)
        rows = U_h[[i - 1 for i in window], :]
        return _stream_snrs(rng, rows, W, split, size, scale, rho, taus)

    # every receiver decodes s_c treating the rest as noise, then removes it
    pc, p1, p2 = snrs(layout.omega_1, cfg.r_1)
    g1c, g1p = pc / (p1 + p2 + 1.0), p1 / (p2 + 1.0)
    if eve_window:
        qc, q1, q2 = snrs(eve_window, cfg.r_e)
    else:
        qc = q1 = q2 = np.zeros(size)
    gec, gep1 = qc / (q1 + q2 + 1.0), q1 / (q2 + 1.0)
    return int(np.count_nonzero(outage(cfg, budget, eve.scenario, g1c, g1p, gec, gep1)))


def _jobs(n_trials: int):
    return [(j, min(CHUNK, n_trials - start)) for j, start in enumerate(range(0, n_trials, CHUNK))]


def _run(counter, cfg, eve, n_trials, seed, workers) -> McEstimate:
    if int(n_trials) != n_trials or n_trials < 1:
        raise DomainError("n_trials must be a positive integer")
    n_trials, seed = int(n_trials), int(seed)
    eve.validate(cfg)
    work = partial(counter, cfg, eve, seed)
    jobs = _jobs(n_trials)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(work, jobs))
    else:
        counts = [work(job) for job in jobs]
    return McEstimate.from_count(sum(counts), n_trials, seed)


def estimate_sop(cfg: SystemConfig, eve: EveLayout, n_trials: int, seed: int, workers: int = 1) -> McEstimate:
    """SOP estimate from norm-level gain sampling."""
    return _run(_count_norm, cfg, eve, n_trials, seed, workers)


def estimate_sop_fullvector(
    cfg: SystemConfig, eve: EveLayout, n_trials: int, seed: int, workers: int = 1
) -> McEstimate:
    """SOP estimate from full complex channel vectors and beamformers.

    The eavesdropper's window consists of its overlaps with Omega_c, Omega_1p
    and Omega_2p; paths outside both users' windows carry no signal and are
    not drawn.  Raises :class:`ScenarioMismatch` when the counts have no
    basis-index realization.
    """
    return _run(_count_fullvector, cfg, eve, n_trials, seed, workers)
