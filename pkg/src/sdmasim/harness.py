"""
Monte Carlo sweeps over random topologies.

Each (K, topology) cell gets its own seed derived from (base_seed, K, t);
the topology and channels are drawn once and every scheme of the scenario
is evaluated on that same realization.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .link import DEFAULT_MCS_TABLE, McsTable
from .mac import (RxStrategy, SchemeConfig, SchemeKind, TxStrategy, run_scheme,
                  reference_configs)
from .rf import SimParams, generate_channels, generate_topology

DEFAULT_K_VALUES = tuple(range(1, 9))


@dataclass(frozen=True)
class Scenario:
    name: str
    schemes: Sequence[SchemeConfig]
    k_values: Sequence[int] = DEFAULT_K_VALUES
    n_topologies: int = 1000
    base_seed: int = 0
    params: SimParams = SimParams()
    mcs_table: McsTable = field(default=DEFAULT_MCS_TABLE, repr=False)

    def __post_init__(self):
        if self.n_topologies < 1:
            raise ValueError("n_topologies must be >= 1")
        if not self.k_values:
            raise ValueError("k_values must not be empty")
        if not self.schemes:
            raise ValueError("scenario needs at least one scheme")
        names = [s.name for s in self.schemes]
        if len(set(names)) != len(names):
            raise ValueError(f"scheme names must be unique: {names}")


@dataclass(frozen=True)
class Cell:
    mean_mbps: float
    std_mbps: float
    n: int


@dataclass
class SweepResult:
    cells: Dict[Tuple[str, int], Cell]
    samples: Dict[Tuple[str, int], np.ndarray] = field(default_factory=dict, repr=False)

    def mean(self, scheme: str, k: int) -> float:
        return self.cells[scheme, k].mean_mbps

    def rows(self):
        """(scheme, k, mean, std, n) sorted by (scheme, k)."""
        return [(s, k, c.mean_mbps, c.std_mbps, c.n) for (s, k), c in sorted(self.cells.items())]


def cell_seed(base_seed: int, k: int, t: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([base_seed, k, t])


def evaluate_cell(scenario: Scenario, k: int, t: int) -> List[float]:
    """Sum throughput of every scheme on realization (k, t)."""
    rng = np.random.default_rng(cell_seed(scenario.base_seed, k, t))
    topo = generate_topology(k, scenario.params, rng)
    chans = generate_channels(topo, scenario.params, 0.0, rng)
    out = []
    for cfg in scenario.schemes:
        res = run_scheme(cfg, replace(chans, est_noise_var=cfg.est_noise_var), topo,
                         scenario.params, scenario.mcs_table)
        out.append(res.sum_throughput_mbps)
    return out


def _evaluate_batch(args):
    scenario, k, ts = args
    return k, ts, [evaluate_cell(scenario, k, t) for t in ts]


def run_scenario(s: Scenario, workers: int = 1) -> SweepResult:
    """Evaluate the full (K, topology) grid and aggregate per (scheme, K).

    ``workers > 1`` spreads topology batches over processes; the result does
    not depend on the worker count.
    """
    raw = {k: np.zeros((s.n_topologies, len(s.schemes))) for k in s.k_values}
    jobs = []
    chunk = max(1, s.n_topologies // (4 * max(workers, 1)))
    for k in s.k_values:
        for start in range(0, s.n_topologies, chunk):
            jobs.append((s, k, list(range(start, min(start + chunk, s.n_topologies)))))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_batch, jobs))
    else:
        results = map(_evaluate_batch, jobs)
    for k, ts, vals in results:
        raw[k][ts] = vals

    cells, samples = {}, {}
    for k in s.k_values:
        for j, cfg in enumerate(s.schemes):
            x = raw[k][:, j]
            std = float(x.std(ddof=1)) if len(x) > 1 else 0.0
            cells[cfg.name, k] = Cell(float(x.mean()), std, len(x))
            samples[cfg.name, k] = x
    return SweepResult(cells, samples)


def _label(tx, rx, mcs):
    m = "adaptive" if mcs is None else f"mcs{mcs}"
    return f"{tx.value}-{rx.value}-{m}"


def figure_scenarios(params: SimParams = SimParams(), n_topologies: int = 1000,
                     base_seed: int = 0) -> List[Scenario]:
    """Scenarios behind the five throughput-vs-K figures, in order."""
    n2 = params.noise_var_mw
    BN, BF = TxStrategy.BEAMNULL, TxStrategy.BEAMFORM
    ZF, MMSE, UMMSE = RxStrategy.ZF, RxStrategy.MMSE, RxStrategy.UMMSE
    common = dict(n_topologies=n_topologies, base_seed=base_seed, params=params)

    # universal MMSE accesses with ZF so later TXs see the same receivers as the ZF run
    fig1 = [SchemeConfig(_label(BN, rx, m), BN, rx, m, 0.0,
                         access_rx=ZF if rx is UMMSE else MMSE)
            for m in (0, 5) for rx in (ZF, MMSE, UMMSE)]
    fig2 = [SchemeConfig(f"{_label(BN, ZF, m)}-est{f:g}", BN, ZF, m, f * n2)
            for m in (0, 5) for f in (0.0, 0.001, 0.01, 0.1, 0.5, 1.0)]
    fig3 = [SchemeConfig(_label(BN, ZF, m), BN, ZF, m, 0.0) for m in (0, 5, None)]
    fig4 = [SchemeConfig(_label(tx, rx, m), tx, rx, m, 0.0)
            for m in (0, None) for tx, rx in ((BN, ZF), (BN, MMSE), (BF, MMSE))]
    fig5 = reference_configs(params)
    return [
        Scenario("fig1", fig1, **common),
        Scenario("fig2", fig2, **common),
        Scenario("fig3", fig3, **common),
        Scenario("fig4", fig4, **common),
        Scenario("fig5", fig5, **common),
    ]
