"""
MAC schemes: sequential concurrent-link access and the single-link
multi-stream reference.
"""

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import beamforming as bf
from .link import (ALPHA, DEFAULT_MCS_TABLE, LinkOutcome, McsTable, effective_ppsnr,
                   judge_link, mcs_rate, ppsnr, select_mcs, stream_ppsnr, to_db)
from .rf import ChannelSet, SimParams, Topology, noisy_channel_matrix, noisy_effective_channel, noisy_intf_column


class TxStrategy(enum.Enum):
    BEAMNULL = "beamnull"
    BEAMFORM = "beamform"


class RxStrategy(enum.Enum):
    ZF = "zf"
    MMSE = "mmse"
    UMMSE = "ummse"


class SchemeKind(enum.Enum):
    CONCURRENT = "concurrent"
    NONCONCURRENT = "nonconcurrent"


@dataclass(frozen=True)
class SchemeConfig:
    """One MAC configuration.

    ``fixed_mcs=None`` means adaptive MCS selection.  ``access_rx`` is the
    receiver that UMMSE links use while the access sequence is running
    (the vector later transmitters null towards); after all links are in,
    UMMSE links switch to the all-link covariance receiver.
    """

    name: str
    tx: TxStrategy = TxStrategy.BEAMNULL
    rx: RxStrategy = RxStrategy.ZF
    fixed_mcs: Optional[int] = 0
    est_noise_var: float = 0.0
    backoff_db: float = 0.0
    kind: SchemeKind = SchemeKind.CONCURRENT
    access_rx: RxStrategy = RxStrategy.MMSE

    def __post_init__(self):
        if self.fixed_mcs is not None and not 0 <= self.fixed_mcs < len(DEFAULT_MCS_TABLE):
            raise ValueError(f"fixed MCS index out of range: {self.fixed_mcs}")
        if self.est_noise_var < 0:
            raise ValueError("est_noise_var must be >= 0")
        if self.access_rx is RxStrategy.UMMSE:
            raise ValueError("access_rx must be ZF or MMSE")

    @property
    def adaptive(self) -> bool:
        return self.fixed_mcs is None


@dataclass(frozen=True)
class SchemeResult:
    per_link: list
    sum_throughput_mbps: float
    tx_vectors: Optional[np.ndarray] = field(default=None, repr=False)
    rx_vectors: Optional[np.ndarray] = field(default=None, repr=False)


def reference_configs(params: SimParams = SimParams()):
    """The four MAC schemes compared at 0.1 sigma_N^2 estimation noise."""
    s2 = 0.1 * params.noise_var_mw
    return [
        SchemeConfig("baseline", TxStrategy.BEAMNULL, RxStrategy.ZF, 0, s2),
        SchemeConfig("enhanced", TxStrategy.BEAMFORM, RxStrategy.MMSE, None, s2),
        SchemeConfig("enhanced-ummse", TxStrategy.BEAMFORM, RxStrategy.UMMSE, None, s2),
        SchemeConfig("nonconcurrent", fixed_mcs=None, est_noise_var=s2, kind=SchemeKind.NONCONCURRENT),
    ]


def _pick_mcs(cfg: SchemeConfig, est_db, table: McsTable):
    if cfg.adaptive:
        est_eff = effective_ppsnr(est_db, ALPHA, cfg.backoff_db)
        return select_mcs(est_eff, table), est_eff
    return cfg.fixed_mcs, float("nan")


def _detect(strategy: RxStrategy, desired, known, noise_var):
    if strategy is RxStrategy.ZF:
        return bf.rx_zf(np.concatenate([desired[..., None], known], axis=-1))
    return bf.rx_mmse(desired, known, noise_var)


def run_concurrent(cfg: SchemeConfig, channels: ChannelSet, topology: Topology,
                   params: SimParams = SimParams(),
                   table: McsTable = DEFAULT_MCS_TABLE) -> SchemeResult:
    """Sequential channel access, then joint evaluation of every link.

    All beam computations use estimates perturbed by ``cfg.est_noise_var``;
    viability is judged on the true channels.
    """
    if cfg.kind is not SchemeKind.CONCURRENT:
        raise ValueError("run_concurrent needs a concurrent scheme")
    k, na, nc = channels.k, params.n_antennas, params.n_subcarriers
    order = [int(i) for i in topology.access_order]
    h, g = channels.true_channels, channels.pathloss_gains
    s2 = cfg.est_noise_var
    noise = params.noise_var_mw
    rng = channels.noise_rng()

    wt = np.zeros((k, nc, na), dtype=complex)
    wr = np.zeros((k, nc, na), dtype=complex)
    est = {}

    def estimate(rx, tx):
        if (rx, tx) not in est:
            est[rx, tx] = noisy_effective_channel(channels.effective(rx, tx, wt[tx], params), s2, rng)
        return est[rx, tx]

    def stack(vectors):
        if not vectors:
            return np.zeros((nc, na, 0), dtype=complex)
        return np.stack(vectors, axis=-1)

    access_rx = cfg.access_rx if cfg.rx is RxStrategy.UMMSE else cfg.rx
    for pos, q in enumerate(order):
        prior = order[:pos]
        cols = stack([noisy_intf_column(bf.intf_column(h[p, q], g[p, q], params, wr[p]), s2, rng)
                      for p in prior])
        if cfg.tx is TxStrategy.BEAMFORM and pos + 1 <= na:
            basis = bf.candidate_basis(cols, na)
            h_est = noisy_channel_matrix(h[q, q], g[q, q], params, s2, rng)
            c = bf.mmse_covariance(stack([estimate(q, p) for p in prior]), noise, na)
            wt[q] = bf.tx_beamform(basis, h_est, g[q, q], params, c)
        else:
            wt[q] = bf.tx_beamnull(cols, na)
        # B = [desired, L_{Q-1}, ..., L_1]
        known = stack([estimate(q, p) for p in reversed(prior)])
        wr[q] = _detect(access_rx, estimate(q, q), known, noise)

    known_of = {}
    for pos, q in enumerate(order):
        if cfg.rx is RxStrategy.UMMSE:
            known_of[q] = [p for p in order if p != q]
        else:
            known_of[q] = list(reversed(order[:pos]))
    if cfg.rx is RxStrategy.UMMSE:
        for q in order:
            wr[q] = bf.rx_ummse(estimate(q, q), stack([estimate(q, p) for p in known_of[q]]), noise)

    outcomes = [None] * k
    for q in range(k):
        true_eff = [channels.effective(q, t, wt[t], params) for t in range(k)]
        true_db = to_db(ppsnr(wr[q], true_eff[q], stack([true_eff[t] for t in range(k) if t != q]), noise))
        true_eff_db = effective_ppsnr(true_db, ALPHA, 0.0)
        est_eff_db = float("nan")
        if cfg.adaptive:
            est_db = to_db(ppsnr(wr[q], estimate(q, q), stack([estimate(q, p) for p in known_of[q]]), noise))
            mcs, est_eff_db = _pick_mcs(cfg, est_db, table)
        else:
            mcs = cfg.fixed_mcs
        out = judge_link(mcs, true_eff_db, table, params)
        outcomes[q] = LinkOutcome(out.chosen_mcs, out.viable, out.throughput_mbps,
                                  true_eff_db, est_eff_db)
    total = float(sum(o.throughput_mbps for o in outcomes))
    return SchemeResult(outcomes, total, wt, wr)


def _run_single_link(cfg, h, gain, params, table, rng):
    """Best stream count for one isolated link; returns its LinkOutcome."""
    h_est = noisy_channel_matrix(h, gain, params, cfg.est_noise_var, rng)
    best = None
    modes = bf.svd_link_vectors(h_est, gain, params, params.n_antennas)
    for s in range(1, params.n_antennas + 1):
        sv = modes.leading(s)
        est_db = to_db(stream_ppsnr(h_est, gain, params, sv.tx_matrix, sv.rx_matrix))
        picks = [_pick_mcs(cfg, est_db[:, j], table) for j in range(s)]
        est_rate = sum(mcs_rate(table[m], params) for m, _ in picks if m is not None)
        # strict '>' keeps the smallest S among ties
        if best is None or est_rate > best[0]:
            best = (est_rate, sv, picks)
    _, sv, picks = best
    true_db = to_db(stream_ppsnr(h, gain, params, sv.tx_matrix, sv.rx_matrix))
    streams = [judge_link(m, effective_ppsnr(true_db[:, j]), table, params)
               for j, (m, _) in enumerate(picks)]
    rate = float(sum(o.throughput_mbps for o in streams))
    return LinkOutcome(
        chosen_mcs=picks[0][0], viable=rate > 0, throughput_mbps=rate,
        true_effective_db=streams[0].true_effective_db, est_effective_db=picks[0][1],
        stream_mcs=tuple(m for m, _ in picks))


def run_nonconcurrent(cfg: SchemeConfig, channels: ChannelSet, topology: Topology,
                      params: SimParams = SimParams(),
                      table: McsTable = DEFAULT_MCS_TABLE) -> SchemeResult:
    """Each link alone on the medium with SVD streams; links share airtime
    equally, so the network rate is the mean per-link rate."""
    if cfg.kind is not SchemeKind.NONCONCURRENT:
        raise ValueError("run_nonconcurrent needs a non-concurrent scheme")
    rng = channels.noise_rng()
    outcomes = [
        _run_single_link(cfg, channels.true_channels[q, q], channels.pathloss_gains[q, q],
                         params, table, rng)
        for q in (int(i) for i in topology.access_order)
    ]
    per_link = [None] * channels.k
    for q, o in zip((int(i) for i in topology.access_order), outcomes):
        per_link[q] = o
    total = float(np.mean([o.throughput_mbps for o in per_link]))
    return SchemeResult(per_link, total)


def run_scheme(cfg: SchemeConfig, channels: ChannelSet, topology: Topology,
               params: SimParams = SimParams(), table: McsTable = DEFAULT_MCS_TABLE) -> SchemeResult:
    if cfg.kind is SchemeKind.NONCONCURRENT:
        return run_nonconcurrent(cfg, channels, topology, params, table)
    return run_concurrent(cfg, channels, topology, params, table)
