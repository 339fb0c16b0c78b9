"""End-to-end acceptance checks at the headline experiment scale.

Nine numbered checks cover the assignment solver, the full three-scheduler
PRR-versus-distance comparison (600 vehicles, 40 s, 5 seeds — takes a few
minutes), channel statistics, protocol invariants, and output determinism.
Each prints one [criterion N] PASS/FAIL line; run with -s to see them.
"""

import itertools
import math
import time

import numpy as np
import pytest
from scipy import stats as scipy_stats

from sidelinksim.assignment import solve_min
from sidelinksim.channel import new_link, update_shadowing
from sidelinksim.cli import main as cli_main
from sidelinksim.config import SimConfig, save_config
from sidelinksim.engine import run
from sidelinksim.metrics import aggregate
from sidelinksim.schedulers import SCHEDULER_NAMES, candidate_floor

CFG = SimConfig()
SEEDS = (0, 1, 2, 3, 4)


@pytest.fixture(scope="module")
def fullscale_runs():
    """All scheduler x seed simulations at default scale, reused by the checks."""
    results = {}
    t0 = time.time()
    for sched in SCHEDULER_NAMES:
        results[sched] = []
        for seed in SEEDS:
            t1 = time.time()
            results[sched].append(run(CFG, sched, seed))
            print(f"  {sched} seed {seed}: {time.time() - t1:.0f} s", flush=True)
    print(f"  simulation grid total: {time.time() - t0:.0f} s", flush=True)
    return results


def _mean_curve(results):
    return aggregate(results, CFG).mean_prr


def _verdict(num, ok, detail):
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'} — {detail}", flush=True)


def test_01_assignment_matches_exhaustive_search():
    rng = np.random.default_rng(2026)
    perm_cache = {}
    mismatches = 0
    t0 = time.time()
    for _ in range(1000):
        m = int(rng.integers(1, 8))
        n = int(rng.integers(1, m + 1))
        c = rng.integers(0, 100, size=(n, m)).astype(float)
        if (n, m) not in perm_cache:
            perm_cache[(n, m)] = np.array(
                list(itertools.permutations(range(m), n)), dtype=np.int64)
        perms = perm_cache[(n, m)]
        best = float(c[np.arange(n), perms].sum(axis=1).min())
        if not math.isclose(solve_min(c).total, best, abs_tol=1e-9):
            mismatches += 1
    elapsed = time.time() - t0
    ok = mismatches == 0 and elapsed < 10.0
    _verdict(1, ok, f"{1000 - mismatches}/1000 random matrices (n,m <= 7) match "
                    f"the exhaustive optimum in {elapsed:.1f} s (limit 10 s)")
    assert mismatches == 0
    assert elapsed < 10.0


def test_02_centralized_curves_versus_baseline(fullscale_runs):
    mp = _mean_curve(fullscale_runs["mode3-minpower"])
    mr = _mean_curve(fullscale_runs["mode3-maxreuse"])
    m4 = _mean_curve(fullscale_runs["mode4-sps"])
    a_ok = bool(np.all(mr >= m4 - 0.01))
    near = (mp - m4)[:2]
    b_ok = bool(np.all(near >= 0.005))
    far = np.abs(mp - m4)[2:]
    c_ok = bool(np.all(far <= 0.05))
    _verdict(2, a_ok and b_ok and c_ok,
             f"(a) max-reuse minus mode-4 per bin {np.round(mr - m4, 4).tolist()} "
             f"(need >= -0.01); "
             f"(b) min-power minus mode-4 at 50/100 m {np.round(near, 4).tolist()} "
             f"(need >= +0.005); "
             f"(c) |min-power - mode-4| at >= 150 m {np.round(far, 4).tolist()} "
             f"(need <= 0.05)")
    assert a_ok, f"max-reuse fell below mode-4 by more than 0.01: {(mr - m4).tolist()}"
    assert b_ok, f"min-power does not exceed mode-4 by 0.005 in the near bins: {near.tolist()}"
    assert c_ok, f"min-power strays from mode-4 beyond 0.05 in the far bins: {far.tolist()}"


def test_03_baseline_absolute_levels(fullscale_runs):
    m4 = _mean_curve(fullscale_runs["mode4-sps"])
    near, far = float(m4[0]), float(m4[-1])
    near_ok = 0.93 <= near <= 1.00
    far_ok = 0.40 <= far <= 0.62
    _verdict(3, near_ok and far_ok,
             f"mode-4 mean PRR per bin {np.round(m4, 4).tolist()}; "
             f"{near:.4f} at 50 m (band [0.93, 1.00]), "
             f"{far:.4f} at 300 m (band [0.40, 0.62])")
    assert near_ok, f"mode-4 PRR at 50 m out of band: {near:.4f}"
    assert far_ok, f"mode-4 PRR at 300 m out of band: {far:.4f}"


def test_04_shadowing_trace_statistics():
    rng = np.random.default_rng(7)
    n = 100_000
    samples = np.empty(n)
    link = update_shadowing(new_link(0, 1), (0.0, 0.0), (0.0, 4.0), rng, CFG)
    pos = 0.0
    for k in range(n):
        pos += 1.0  # one metre of relative displacement per step
        link = update_shadowing(link, (0.0, 0.0), (pos % CFG.road_length_m, 4.0),
                                rng, CFG)
        samples[k] = link.shadow_db
    std = float(samples.std())
    autocorr = float(np.corrcoef(samples[:-10], samples[10:])[0, 1])
    std_ok = abs(std - 7.0) <= 0.5
    ac_ok = abs(autocorr - math.exp(-1.0)) <= 0.05
    _verdict(4, std_ok and ac_ok,
             f"std {std:.3f} dB over 1e5 steps (7 +- 0.5), 10 m autocorrelation "
             f"{autocorr:.3f} (0.368 +- 0.05)")
    assert std_ok and ac_ok


def test_05_candidate_floor_never_violated(fullscale_runs):
    checked = violations = 0
    for res in fullscale_runs["mode4-sps"]:
        cand = np.asarray(res.stats.mode4_candidates)
        sel = np.asarray(res.stats.mode4_selectable)
        floors = np.array([candidate_floor(int(s), CFG) for s in sel])
        violations += int(np.count_nonzero(cand < floors))
        checked += cand.size
    ok = violations == 0 and checked > 0
    _verdict(5, ok, f"{checked} reselections across {len(SEEDS)} runs, "
                    f"{violations} below the 20% candidate floor")
    assert ok


def test_06_half_duplex_never_receives(fullscale_runs):
    records = bad = 0
    for results in fullscale_runs.values():
        for res in results:
            bad += res.stats.half_duplex_received
            records += res.stats.records
    ok = bad == 0 and records > 0
    _verdict(6, ok, f"{records} reception evaluations, {bad} marked received "
                    f"while the receiver was transmitting")
    assert ok


def test_07_identical_invocations_byte_identical(tmp_path):
    cfg_path = tmp_path / "default.cfg"
    save_config(CFG, cfg_path)
    identical = True
    sizes = []
    for sched in SCHEDULER_NAMES:
        paths = []
        for label in ("a", "b"):
            out = tmp_path / f"{sched}-{label}"
            rc = cli_main(["run", "--config", str(cfg_path), "--scheduler", sched,
                           "--seed-list", "0", "--out", str(out), "--jobs", "1"])
            assert rc == 0
            paths.append(out / f"{sched}_0.csv")
        data = [p.read_bytes() for p in paths]
        sizes.append(len(data[0]))
        identical &= data[0] == data[1]
    _verdict(7, identical, f"re-ran each scheduler at seed 0 through the CLI; "
                           f"per-run files ({sizes} bytes) byte-identical: {identical}")
    assert identical


def test_08_reservation_lifetimes_uniform(fullscale_runs):
    pooled = np.concatenate([np.asarray(res.stats.lifetimes_ms)
                             for results in fullscale_runs.values() for res in results])
    bounds_ok = bool(np.all((500.0 <= pooled) & (pooled <= 1500.0)))
    sample = np.asarray(fullscale_runs["mode4-sps"][0].stats.lifetimes_ms)[:10_000]
    ks = scipy_stats.kstest(sample / 1000.0, "uniform", args=(0.5, 1.0))
    ks_ok = ks.pvalue >= 0.01 and sample.size == 10_000
    _verdict(8, bounds_ok and ks_ok,
             f"{pooled.size} lifetimes all inside [0.5 s, 1.5 s]: {bounds_ok}; "
             f"KS uniformity on 1e4 draws p = {ks.pvalue:.3f} (alpha 0.01)")
    assert bounds_ok, f"lifetimes outside bounds: [{pooled.min()}, {pooled.max()}]"
    assert ks_ok


def test_09_prr_decreases_with_distance(fullscale_runs):
    ok = True
    details = []
    for sched, results in fullscale_runs.items():
        curve = _mean_curve(results)
        rises = np.diff(curve)
        rises = rises[rises > 1e-12]
        sched_ok = rises.size <= 1 and bool(np.all(rises <= 0.02))
        details.append(f"{sched}: {rises.size} inversions"
                       + (f" (max +{float(rises.max()):.4f})" if rises.size else ""))
        ok &= sched_ok
    _verdict(9, ok, "; ".join(details) + " (allow at most one rise of <= 0.02)")
    assert ok
