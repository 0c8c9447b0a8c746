"""Monte Carlo estimation of direct, relayed and end-to-end success.

One trial is one two-slot frame on a fresh deployment.  Slot 0: every
source transmits; relays and destinations try to decode.  Slot 1: the
relays chosen by the selection policy forward, all at once, with fresh
fading.  Statistics are collected only for sources inside the measurement
region of the window.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import RX_DESTINATION, FadingField, received_power, receive
from .geometry import NetworkRealization, ParameterError, PathLossModel, Window, sample_ppp
from .policies import (AllTransmit, CenterBaseline, DecodeTable, SelectionPolicy,
                       center_baseline_realization, count_connected, decode_table)

# sub-stream indices, one per independent source of randomness in a trial
STREAM_SOURCES = 0
STREAM_RELAYS = 1
STREAM_ANGLES = 2
STREAM_FADING = 3
STREAM_THINNING = 4

WORKERS_ENV = "TWOHOP_MAX_WORKERS"


class EstimationError(RuntimeError):
    """No source fell inside the measurement region in any trial."""


@dataclass(frozen=True)
class SimulationConfig:
    lambda_s: float
    lambda_r: float
    R: float
    T: float = 3.0
    alpha: float = 4.0
    bounded: bool = False
    half_width: float = 15.0
    guard_margin: float | None = None
    policy: SelectionPolicy = field(default_factory=AllTransmit)
    n_trials: int = 100
    master_seed: int = 0

    def __post_init__(self):
        if not (self.lambda_s >= 0 and self.lambda_r >= 0):
            raise ParameterError("densities must be non-negative")
        if not self.R > 0:
            raise ParameterError(f"R must be positive, got {self.R}")
        if not self.T > 0:
            raise ParameterError(f"T must be positive, got {self.T}")
        if self.T <= 1:
            warnings.warn("T <= 1: receivers may decode several transmitters", stacklevel=3)
        if int(self.n_trials) < 1:
            raise ParameterError("n_trials must be >= 1")
        Window(self.half_width, self.guard_margin)  # validates
        PathLossModel(self.alpha, self.bounded)

    @property
    def window(self) -> Window:
        return Window(self.half_width, self.guard_margin)

    @property
    def model(self) -> PathLossModel:
        return PathLossModel(self.alpha, self.bounded)


def substream(master_seed: int, trial: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial, purpose)))


def sample_realization(config: SimulationConfig, trial: int) -> tuple[NetworkRealization, np.ndarray]:
    """Deployment for ``trial`` plus the per-relay thinning uniforms."""
    window = config.window
    sources = sample_ppp(config.lambda_s, window, substream(config.master_seed, trial, STREAM_SOURCES))
    relays = sample_ppp(config.lambda_r, window, substream(config.master_seed, trial, STREAM_RELAYS))
    angles = substream(config.master_seed, trial, STREAM_ANGLES).uniform(0, 2 * np.pi, len(sources))
    fseed = int(np.random.SeedSequence(config.master_seed,
                                       spawn_key=(trial, STREAM_FADING)).generate_state(1)[0])
    real = NetworkRealization(sources, angles, relays, config.R, fseed)
    uniforms = substream(config.master_seed, trial, STREAM_THINNING).uniform(size=len(relays))
    return real, uniforms


@dataclass(frozen=True, eq=False)
class TrialRecord:
    """Outcomes for the measured sources of one trial.

    ``transmit_set`` holds the relay indices forwarding in slot 1 and
    ``cluster_size`` the size of each measured source's forwarding set.
    ``max_connected`` is the largest number of transmitters that cleared the
    threshold at any single receiver in either slot.
    """

    trial: int
    measured: np.ndarray
    direct: np.ndarray
    twohop: np.ndarray
    cluster_size: np.ndarray
    decode_size: np.ndarray
    transmit_set: np.ndarray
    max_connected: int

    @property
    def joint(self) -> np.ndarray:
        return self.direct | self.twohop

    @property
    def n_measured(self) -> int:
        return len(self.measured)


def run_trial(config: SimulationConfig, trial_index: int, realization=None,
              uniforms=None) -> TrialRecord:
    """Simulate one frame; ``realization`` overrides the sampled deployment."""
    if realization is None:
        real, uniforms = sample_realization(config, trial_index)
    else:
        real = realization
        if uniforms is None:
            uniforms = np.zeros(real.n_relays)
    policy = config.policy
    baseline = isinstance(policy, CenterBaseline)
    if baseline:
        real = center_baseline_realization(real)
        uniforms = np.zeros(real.n_relays)

    model, T = config.model, config.T
    fading = FadingField(real.fading_seed)
    src, dst = real.sources.points, real.destinations
    n_s = real.n_sources
    measured = np.flatnonzero(config.window.in_measurement_region(src))

    # slot 0: all sources transmit
    table: DecodeTable = decode_table(real, fading, T, model, uniforms)
    h_dest = fading.rows(np.arange(n_s), n_s, slot=0, rx_kind=RX_DESTINATION)[:, measured]
    p_dest = received_power(src, dst[measured], h_dest, model)
    rec0 = receive(p_dest, T)
    direct = rec0.connected & (rec0.best == measured)
    max_conn = max(int(table.n_connected.max(initial=0)),
                   int(count_connected(p_dest, T).max(initial=0)))

    # relay selection, element-wise over decoded relays
    s_idx = table.source
    keep = policy.keep(src[s_idx], dst[s_idx], table.relay_points, table.rss,
                       table.uniform, T, config.R)
    if baseline:
        keep = keep & (table.relay == s_idx)
    psi = table.relay[keep]
    psi_source = s_idx[keep]

    # slot 1: selected relays forward
    rel = real.relays.points
    h1 = fading.rows(psi, n_s, slot=1, rx_kind=RX_DESTINATION)[:, measured]
    p1 = received_power(rel[psi], dst[measured], h1, model)
    rec1 = receive(p1, T)
    best_src = np.full(len(measured), -1)
    if len(psi):
        best_src = psi_source[rec1.best]
    twohop = rec1.connected & (best_src == measured)
    max_conn = max(max_conn, int(count_connected(p1, T).max(initial=0)))

    cluster = np.bincount(psi_source, minlength=n_s)[measured]
    decoded = np.bincount(s_idx, minlength=n_s)[measured]
    return TrialRecord(trial_index, measured, direct, twohop, cluster, decoded,
                       np.sort(psi), max_conn)


def ratio_se(successes, counts) -> float:
    """Standard error of ``sum(successes) / sum(counts)`` with trials as the sampling unit."""
    s = np.asarray(successes, dtype=float)
    n = np.asarray(counts, dtype=float)
    N = n.sum()
    p = s.sum() / N
    k = len(n)
    if k < 2:
        return math.sqrt(max(p * (1 - p), 0.0) / N)
    resid = s - p * n
    return float(math.sqrt(k / (k - 1) * np.sum(resid ** 2)) / N)


@dataclass(frozen=True)
class EstimateRecord:
    P1_hat: float
    P2_hat: float
    Ps_composed: float
    Ps_joint: float
    se_P1: float
    se_P2: float
    se_Ps_composed: float
    se_Ps_joint: float
    independence_gap: float
    se_independence_gap: float
    mean_cluster_size: float
    se_cluster_size: float
    mean_decode_size: float
    n_sources_measured: int
    n_trials: int

    def as_dict(self) -> dict:
        return asdict(self)


def aggregate(records) -> EstimateRecord:
    """Pool trial records into estimates; standard errors are computed over trials."""
    records = list(records)
    counts = np.array([r.n_measured for r in records], dtype=float)
    N = counts.sum()
    if N == 0:
        raise EstimationError(
            f"no source fell in the measurement region over {len(records)} trial(s); "
            "increase the window, the source density or the number of trials")
    keep = counts > 0
    counts = counts[keep]
    recs = [r for r, k in zip(records, keep) if k]

    def per_trial(attr):
        return np.array([np.sum(getattr(r, attr)) for r in recs], dtype=float)

    s1, s2, sj = per_trial("direct"), per_trial("twohop"), per_trial("joint")
    sc, sd = per_trial("cluster_size"), per_trial("decode_size")
    p1, p2, pj = s1.sum() / N, s2.sum() / N, sj.sum() / N
    ps = 1 - (1 - p1) * (1 - p2)
    # linearised residuals for the composed estimator and the gap
    lin_ps = (1 - p2) * (s1 - p1 * counts) + (1 - p1) * (s2 - p2 * counts)
    lin_gap = (sj - pj * counts) - lin_ps

    def se_lin(resid):
        k = len(resid)
        if k < 2:
            return float("nan")
        return math.sqrt(k / (k - 1) * np.sum(resid ** 2)) / N

    se_ps = se_lin(lin_ps)
    se_gap = se_lin(lin_gap)
    se_size = _mean_se(sc, counts)
    if len(counts) < 2:
        # one trial: fall back to treating its sources as independent
        se_ps = math.sqrt(max(ps * (1 - ps), 0.0) / N)
        se_gap = math.sqrt(max(pj * (1 - pj), 0.0) / N)
        se_size = float(np.std(recs[0].cluster_size, ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return EstimateRecord(
        P1_hat=float(p1), P2_hat=float(p2), Ps_composed=float(ps), Ps_joint=float(pj),
        se_P1=ratio_se(s1, counts), se_P2=ratio_se(s2, counts),
        se_Ps_composed=float(se_ps), se_Ps_joint=ratio_se(sj, counts),
        independence_gap=float(pj - ps), se_independence_gap=float(se_gap),
        mean_cluster_size=float(sc.sum() / N), se_cluster_size=float(se_size),
        mean_decode_size=float(sd.sum() / N),
        n_sources_measured=int(N), n_trials=len(records),
    )


def _mean_se(totals, counts) -> float:
    k = len(counts)
    N = counts.sum()
    m = totals.sum() / N
    if k < 2:
        return float("nan")
    return math.sqrt(k / (k - 1) * np.sum((totals - m * counts) ** 2)) / N


def max_workers(requested=None) -> int:
    cap = os.environ.get(WORKERS_ENV)
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _run_chunk(args):
    config, trials = args
    return [run_trial(config, t) for t in trials]


def run_trials(config: SimulationConfig, workers: int = 1) -> list[TrialRecord]:
    trials = range(int(config.n_trials))
    workers = max_workers(workers)
    if workers <= 1 or config.n_trials < 2:
        return [run_trial(config, t) for t in trials]
    chunks = [list(trials[i::workers]) for i in range(workers)]
    with ProcessPoolExecutor(workers) as ex:
        parts = list(ex.map(_run_chunk, [(config, c) for c in chunks]))
    out = [r for part in parts for r in part]
    return sorted(out, key=lambda r: r.trial)


def estimate(config: SimulationConfig, workers: int = 1) -> EstimateRecord:
    """Estimate P1, P2 and Ps for ``config``; deterministic given ``master_seed``."""
    return aggregate(run_trials(config, workers))
