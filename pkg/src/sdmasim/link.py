"""
Link quality and rate: post-processing SNR, effective-SNR compression over
subcarriers, MCS selection and viability.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import yaml

from .rf import SimParams

ALPHA = 0.125
# keeps log10 finite when a subcarrier is perfectly nulled
_PPSNR_FLOOR = 1e-30

QAM_BITS = {"BPSK": 1, "QPSK": 2, "16QAM": 4, "64QAM": 6, "256QAM": 8}


@dataclass(frozen=True)
class McsEntry:
    index: int
    modulation: str
    code_rate: Fraction
    threshold_db: float

    @property
    def bits_per_symbol(self) -> int:
        return QAM_BITS[self.modulation]


@dataclass(frozen=True)
class McsTable:
    entries: tuple

    def __post_init__(self):
        if not self.entries:
            raise ValueError("MCS table is empty")
        th = [e.threshold_db for e in self.entries]
        if any(b <= a for a, b in zip(th, th[1:])):
            raise ValueError("MCS thresholds must be strictly increasing")
        if [e.index for e in self.entries] != list(range(len(self.entries))):
            raise ValueError("MCS indices must be 0..n-1 in order")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i) -> McsEntry:
        return self.entries[i]

    @property
    def thresholds_db(self) -> np.ndarray:
        return np.array([e.threshold_db for e in self.entries])


DEFAULT_MCS_TABLE = McsTable(tuple(
    McsEntry(i, mod, Fraction(rate), th)
    for i, (mod, rate, th) in enumerate([
        ("BPSK", "1/2", 1.4),
        ("QPSK", "1/2", 4.4),
        ("QPSK", "3/4", 6.5),
        ("16QAM", "1/2", 8.6),
        ("16QAM", "3/4", 12.0),
        ("64QAM", "2/3", 15.8),
        ("64QAM", "3/4", 17.2),
        ("64QAM", "5/6", 18.8),
    ])
))


def mcs_table_from_records(records) -> McsTable:
    """Build a table from ``[{modulation, code_rate, threshold_db}, ...]``."""
    entries = []
    for i, rec in enumerate(records):
        try:
            mod = str(rec["modulation"]).upper()
            if mod not in QAM_BITS:
                raise ValueError(f"unknown modulation {rec['modulation']!r}")
            entries.append(McsEntry(i, mod, Fraction(str(rec["code_rate"])),
                                    float(rec["threshold_db"])))
        except KeyError as exc:
            raise ValueError(f"MCS entry {i}: missing field {exc.args[0]!r}") from None
    return McsTable(tuple(entries))


def load_mcs_table(path) -> McsTable:
    """Read an MCS table from a YAML file holding a list of entries
    (or a mapping with an ``mcs_table`` list)."""
    data = yaml.safe_load(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("mcs_table")
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a list of MCS entries")
    return mcs_table_from_records(data)


@dataclass(frozen=True)
class LinkOutcome:
    chosen_mcs: Optional[int]
    viable: bool
    throughput_mbps: float
    true_effective_db: float = float("nan")
    est_effective_db: float = float("nan")
    stream_mcs: tuple = field(default=())


def _as_columns(interferers, n):
    if isinstance(interferers, np.ndarray):
        return interferers
    if len(interferers) == 0:
        return np.zeros((n, 0), dtype=complex)
    return np.stack(interferers, axis=-1)


def ppsnr(w_r, h_desired, interferers, noise_var: float):
    """Post-processing SINR |w^H h|^2 / (sum_q |w^H h_q|^2 + noise)."""
    if not noise_var > 0:
        raise ValueError("noise variance must be positive")
    w_r = np.asarray(w_r)
    sig = np.abs(np.einsum("...i,...i->...", np.conj(w_r), h_desired)) ** 2
    cols = _as_columns(interferers, w_r.shape[-1])
    leak = np.abs(np.einsum("...i,...iq->...q", np.conj(w_r), cols)) ** 2
    return sig / (leak.sum(axis=-1) + noise_var)


def to_db(x):
    return 10.0 * np.log10(np.maximum(x, _PPSNR_FLOOR))


def effective_ppsnr(per_subcarrier_db, alpha: float = ALPHA, backoff_db: float = 0.0) -> float:
    """mean - alpha * var (population variance) - backoff, all in dB."""
    x = np.asarray(per_subcarrier_db, dtype=float)
    if x.size == 0:
        raise ValueError("need at least one subcarrier")
    return float(x.mean() - alpha * x.var() - backoff_db)


def select_mcs(effective_db: float, table: McsTable = DEFAULT_MCS_TABLE) -> Optional[int]:
    """Highest MCS whose threshold does not exceed ``effective_db``."""
    n = int(np.searchsorted(table.thresholds_db, effective_db, side="right"))
    return n - 1 if n > 0 else None


def mcs_rate(mcs: McsEntry, params: SimParams) -> float:
    """Data rate in Mbps with every subcarrier carrying data."""
    symbol_rate = params.bandwidth_hz / (1.0 + params.guard_fraction)
    return mcs.bits_per_symbol * float(mcs.code_rate) * symbol_rate / 1e6


def judge_link(selected_mcs: Optional[int], true_effective_db: float,
               table: McsTable = DEFAULT_MCS_TABLE,
               params: SimParams = SimParams()) -> LinkOutcome:
    if selected_mcs is None:
        return LinkOutcome(None, False, 0.0, true_effective_db)
    ok = true_effective_db >= table[selected_mcs].threshold_db
    rate = mcs_rate(table[selected_mcs], params) if ok else 0.0
    return LinkOutcome(selected_mcs, bool(ok), rate, true_effective_db)


def stream_ppsnr(h, gain, params: SimParams, tx_matrix, rx_matrix):
    """Per-stream PPSNR for S parallel streams sharing P_T equally.

    Returns ``(..., S)``; cross-stream leakage counts as interference.
    """
    s = tx_matrix.shape[-1]
    scale = np.sqrt(params.tx_power_mw * gain / (params.n_subcarriers * s))
    # g[..., r, t] = u_r^H (scale H) v_t
    g = scale * (np.conj(np.swapaxes(rx_matrix, -1, -2)) @ h @ tx_matrix)
    p = np.abs(g) ** 2
    sig = np.diagonal(p, axis1=-2, axis2=-1)
    leak = p.sum(axis=-1) - sig
    return sig / (leak + params.noise_var_mw)


def rates_for(table: McsTable, params: SimParams) -> Sequence[float]:
    return [mcs_rate(e, params) for e in table.entries]
