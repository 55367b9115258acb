"""Monte Carlo link-level simulation of concurrent-link SDMA MAC schemes
for single-hop MIMO-OFDM ad hoc networks."""

from .harness import Scenario, SweepResult, figure_scenarios, run_scenario
from .link import DEFAULT_MCS_TABLE, LinkOutcome, McsEntry, McsTable
from .mac import (RxStrategy, SchemeConfig, SchemeKind, SchemeResult, TxStrategy,
                  run_concurrent, run_nonconcurrent, run_scheme, reference_configs)
from .rf import ChannelSet, SimParams, Topology, generate_channels, generate_topology

__all__ = [
    "ChannelSet", "DEFAULT_MCS_TABLE", "LinkOutcome", "McsEntry", "McsTable", "RxStrategy",
    "Scenario", "SchemeConfig", "SchemeKind", "SchemeResult", "SimParams", "SweepResult",
    "Topology", "TxStrategy", "figure_scenarios", "generate_channels", "generate_topology",
    "run_concurrent", "run_nonconcurrent", "run_scenario", "run_scheme", "reference_configs",
]
