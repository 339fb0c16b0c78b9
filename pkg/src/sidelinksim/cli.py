"""Command line front end.

Subcommands:
  run              simulate scheduler x seed combinations, write per-run and
                   per-scheduler summary CSVs
  summarize        re-aggregate existing per-run CSVs into summaries plus a
                   side-by-side comparison table
  validate-config  check a config file and print the effective parameters

Per-run outputs are named <scheduler>_<seed>.csv so concurrent runs never
collide.  On failure the files written by the current invocation are removed.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import engine, metrics
from .config import ConfigError, SimConfig, load_config, validate
from .schedulers import SCHEDULER_NAMES


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sidelinksim",
                                description="C-V2X sidelink subchannel scheduling simulator")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate and write per-run + summary CSVs")
    run.add_argument("--config", help="flat key = value config file (defaults if omitted)")
    run.add_argument("--scheduler", action="append", choices=SCHEDULER_NAMES,
                     help="scheduler to run; repeatable; default: all three")
    seeds = run.add_mutually_exclusive_group()
    seeds.add_argument("--seeds", type=int, default=5, metavar="N",
                       help="run seeds 0..N-1 (default 5)")
    seeds.add_argument("--seed-list", metavar="A,B,C",
                       help="comma-separated explicit seeds")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--jobs", type=int, default=None, metavar="N",
                     help="parallel worker processes (default: available cores)")
    run.add_argument("--trace", action="store_true",
                     help="also write a per-reception trace per run (large)")

    summ = sub.add_parser("summarize", help="aggregate per-run CSVs")
    summ.add_argument("files", nargs="+", help="per-run CSV files")
    summ.add_argument("--config", help="config the runs used (defaults if omitted)")
    summ.add_argument("--out", required=True, help="output directory")

    val = sub.add_parser("validate-config", help="check a config file")
    val.add_argument("--config", help="config file (defaults if omitted)")
    return p


def _load(path) -> SimConfig:
    if path is None:
        return validate(SimConfig())
    return load_config(path)


def _execute_run(args) -> str:
    """Worker: one (config, scheduler, seed) simulation to one per-run file."""
    config, scheduler, seed, out_dir, trace = args
    run_path = os.path.join(out_dir, f"{scheduler}_{seed}.csv")
    trace_path = os.path.join(out_dir, f"{scheduler}_{seed}_trace.csv") if trace else None
    result = engine.run(config, scheduler=scheduler, seed=seed, trace=trace_path)
    metrics.write_run_csv(result, run_path)
    return run_path


def cmd_run(args) -> int:
    try:
        config = _load(args.config)
    except (ConfigError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    schedulers_ = args.scheduler or list(SCHEDULER_NAMES)
    if args.seed_list:
        try:
            seed_values = [int(s) for s in args.seed_list.split(",") if s.strip()]
        except ValueError:
            print(f"error: --seed-list must be comma-separated integers, "
                  f"got {args.seed_list!r}", file=sys.stderr)
            return 2
    else:
        seed_values = list(range(args.seeds))
    if not seed_values:
        print("error: no seeds to run", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    tasks = [(config, s, seed, args.out, args.trace)
             for s in schedulers_ for seed in seed_values]
    written = []
    try:
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for path in pool.map(_execute_run, tasks):
                    written.append(path)
                    print(f"wrote {path}")
        else:
            for task in tasks:
                path = _execute_run(task)
                written.append(path)
                print(f"wrote {path}")
        for s in schedulers_:
            rows = []
            for seed in seed_values:
                rows.extend(metrics.read_run_csv(os.path.join(args.out, f"{s}_{seed}.csv")))
            agg = metrics.aggregate(rows, config)
            path = os.path.join(args.out, f"summary_{s}.csv")
            metrics.write_summary_csv(agg, path)
            written.append(path)
            print(f"wrote {path}")
    except Exception as e:
        for path in written:
            try:
                os.remove(path)
            except OSError:
                pass
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def cmd_summarize(args) -> int:
    try:
        config = _load(args.config)
    except (ConfigError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    rows = []
    try:
        for path in args.files:
            rows.extend(metrics.read_run_csv(path))
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    by_scheduler = {}
    for r in rows:
        by_scheduler.setdefault(r.scheduler, []).append(r)
    os.makedirs(args.out, exist_ok=True)
    written = []
    try:
        aggs = []
        for name in sorted(by_scheduler):
            agg = metrics.aggregate(by_scheduler[name], config)
            aggs.append(agg)
            path = os.path.join(args.out, f"summary_{name}.csv")
            metrics.write_summary_csv(agg, path)
            written.append(path)
            print(f"wrote {path}")
        path = os.path.join(args.out, "comparison.csv")
        metrics.write_comparison_csv(aggs, path)
        written.append(path)
        print(f"wrote {path}")
    except Exception as e:
        for path in written:
            try:
                os.remove(path)
            except OSError:
                pass
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def cmd_validate_config(args) -> int:
    try:
        config = _load(args.config)
    except (ConfigError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    source = args.config or "(defaults)"
    print(f"config OK: {source}")
    for name in sorted(vars(config)):
        print(f"  {name} = {getattr(config, name)}")
    print(f"  derived num_subchannels = {config.num_subchannels}")
    print(f"  derived noise_power_dbm = {config.noise_power_dbm:.3f}")
    print(f"  derived sensing_window_slots = {config.sensing_window_slots}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "summarize":
            return cmd_summarize(args)
        return cmd_validate_config(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
