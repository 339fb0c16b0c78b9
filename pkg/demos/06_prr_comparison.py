"""Headline experiment: PRR versus distance for all three schedulers.

Runs every scheduler over a common set of seeds, aggregates packet reception
ratio into 50 m distance bins, and plots the mean curves with confidence
bands.  The default settings finish in about half a minute; --full switches
to the 40 s / 5 seed configuration used by the acceptance tests (several
minutes).
"""

import argparse
import time
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from sidelinksim import SCHEDULER_NAMES, SimConfig, aggregate, run
from sidelinksim.metrics import write_comparison_csv

OUT = Path(__file__).resolve().parent / "out"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1])
    ap.add_argument("--duration-ms", type=int, default=10000)
    ap.add_argument("--full", action="store_true",
                    help="40 s runs over seeds 0-4 (several minutes)")
    args = ap.parse_args()
    seeds = list(range(5)) if args.full else args.seeds
    cfg = SimConfig() if args.full else SimConfig(sim_duration_ms=args.duration_ms)

    OUT.mkdir(exist_ok=True)
    aggs = []
    for sched in SCHEDULER_NAMES:
        results = []
        for seed in seeds:
            t0 = time.time()
            results.append(run(cfg, sched, seed))
            print(f"{sched} seed {seed}: {time.time() - t0:.1f} s", flush=True)
        aggs.append(aggregate(results, cfg))

    print(f"\n{'bin [m]':>8}" + "".join(f"{a.scheduler:>18}" for a in aggs))
    for i, c in enumerate(aggs[0].centers):
        row = "".join(f"{a.mean_prr[i]:18.4f}" for a in aggs)
        print(f"{c:8.0f}{row}")

    csv_path = OUT / "prr_comparison.csv"
    write_comparison_csv(aggs, csv_path)

    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    for a in aggs:
        ax.plot(a.centers, a.mean_prr, marker="o", label=a.scheduler)
        if a.n_seeds > 1:
            ax.fill_between(a.centers, a.ci_low, a.ci_high, alpha=0.2)
    ax.set_xlabel("tx-rx distance bin centre [m]")
    ax.set_ylabel("packet reception ratio")
    ax.set_ylim(0.0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend()
    ax.set_title(f"{cfg.num_vehicles} vehicles, {cfg.sim_duration_ms / 1000:.0f} s, "
                 f"{len(seeds)} seeds")
    fig.tight_layout()
    fig.savefig(OUT / "prr_comparison.png", dpi=150)
    print(f"\nwrote {csv_path}")
    print(f"wrote {OUT / 'prr_comparison.png'}")


if __name__ == "__main__":
    main()
