"""Command-line driver: run a figure scenario or a custom YAML sweep, write CSV."""

import argparse
import io
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from .harness import SweepResult, figure_scenarios, run_scenario
from .scenario_file import ScenarioFileError, load_custom_scenario

log = logging.getLogger("sdmasim")

SCENARIOS = ("fig1", "fig2", "fig3", "fig4", "fig5", "custom")
CSV_HEADER = "scheme,k,mean_mbps,std_mbps,n"

_PLOT_SCRIPT = '''\
"""Render {title}: sum throughput vs number of concurrent links."""
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).with_suffix("")
lines = here.with_suffix(".dat").read_text().splitlines()
names = lines[0].split("\\t")[1:]
rows = [[float(x) for x in ln.split("\\t")] for ln in lines[1:]]
ks = [r[0] for r in rows]
fig, ax = plt.subplots(figsize=(6, 4))
for j, name in enumerate(names, start=1):
    ax.plot(ks, [r[j] for r in rows], marker="o", label=name)
ax.set_xlabel("Number of concurrent links")
ax.set_ylabel("Sum throughput (Mbps)")
ax.set_title("{title}")
ax.grid(True, alpha=0.3)
ax.legend(fontsize=7)
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else str(here.with_suffix(".png"))
fig.savefig(out, dpi=150)
'''


def format_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for scheme, k, mean, std, n in result.rows():
        buf.write(f"{scheme},{k},{mean:.6f},{std:.6f},{n}\n")
    return buf.getvalue()


def write_plot(result: SweepResult, scheme_order, k_values, out: Path, title: str):
    """Write ``<out>.plot.dat`` (k by scheme table) and ``<out>.plot.py``."""
    stem = out.with_suffix("")
    dat = Path(f"{stem}.plot.dat")
    script = Path(f"{stem}.plot.py")
    lines = ["k\t" + "\t".join(scheme_order)]
    for k in k_values:
        lines.append("\t".join([str(k)] + [f"{result.mean(s, k):.6f}" for s in scheme_order]))
    dat.write_text("\n".join(lines) + "\n")
    script.write_text(_PLOT_SCRIPT.format(title=title))
    return dat, script


def build_parser():
    p = argparse.ArgumentParser(
        prog="sdmasim",
        description="Monte Carlo sum-throughput sweeps for concurrent-link SDMA MAC schemes.")
    p.add_argument("--scenario", required=True, choices=SCENARIOS,
                   help="figure scenario to reproduce, or 'custom' with --config")
    p.add_argument("--config", type=Path, help="YAML scenario file (required for custom)")
    p.add_argument("--topologies", type=int, help="topologies per (scheme, K) point")
    p.add_argument("--seed", type=int, help="base random seed")
    p.add_argument("--out", type=Path, help="CSV destination (default: stdout)")
    p.add_argument("--plot", action="store_true",
                   help="also write <out>.plot.dat and a matplotlib <out>.plot.py")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)

    if args.scenario == "custom" and args.config is None:
        parser.error("--scenario custom requires --config")
    if args.plot and args.out is None:
        parser.error("--plot requires --out")
    if args.topologies is not None and args.topologies < 1:
        parser.error("--topologies must be >= 1")

    if args.scenario == "custom":
        try:
            scenario = load_custom_scenario(args.config)
        except (OSError, ScenarioFileError) as exc:
            print(f"sdmasim: {exc}", file=sys.stderr)
            return 1
    else:
        scenario = {s.name: s for s in figure_scenarios()}[args.scenario]
    overrides = {}
    if args.topologies is not None:
        overrides["n_topologies"] = args.topologies
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    scenario = replace(scenario, **overrides)

    if args.out is not None:
        parent = args.out.resolve().parent
        if not parent.is_dir():
            print(f"sdmasim: cannot write {args.out}: no such directory", file=sys.stderr)
            return 1

    t0 = time.perf_counter()
    log.info("running %s: %d schemes, K=%s, %d topologies",
             scenario.name, len(scenario.schemes), list(scenario.k_values), scenario.n_topologies)
    result = run_scenario(scenario, workers=args.workers)
    log.info("done in %.1f s", time.perf_counter() - t0)

    text = format_csv(result)
    if args.out is None:
        sys.stdout.write(text)
        return 0
    try:
        args.out.write_text(text)
        if args.plot:
            write_plot(result, [s.name for s in scenario.schemes], scenario.k_values,
                       args.out, scenario.name)
    except OSError as exc:
        print(f"sdmasim: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
