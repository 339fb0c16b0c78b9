"""Packet reception ratio versus distance, aggregation, and CSV formats.

Distance bins are half-open intervals [center - halfwidth, center + halfwidth)
around each configured center.  Half-duplex blocked receptions count toward
the expected total, so the blocking penalty shows up in PRR.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig

RUN_HEADER = ["scheduler", "seed", "bin_center_m", "expected", "received", "prr"]
SUMMARY_HEADER = ["scheduler", "bin_center_m", "mean_prr", "ci_low", "ci_high", "n_seeds"]


@dataclass
class PrrAccumulator:
    """Per-bin counters of evaluated (expected) and successful receptions."""

    centers: np.ndarray
    halfwidth: float
    expected: np.ndarray = field(default=None)
    received: np.ndarray = field(default=None)

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float)
        if self.expected is None:
            self.expected = np.zeros(self.centers.size, dtype=np.int64)
        if self.received is None:
            self.received = np.zeros(self.centers.size, dtype=np.int64)
        # interleaved [lo0, hi0, lo1, hi1, ...]; distance d lands in bin k
        # iff searchsorted(bounds, d, 'right') == 2k + 1
        self._bounds = np.empty(2 * self.centers.size)
        self._bounds[0::2] = self.centers - self.halfwidth
        self._bounds[1::2] = self.centers + self.halfwidth

    @classmethod
    def from_config(cls, config: SimConfig) -> "PrrAccumulator":
        return cls(np.asarray(config.prr_bin_centers_m, dtype=float),
                   config.prr_bin_halfwidth_m)

    def add(self, distances_m: np.ndarray, received: np.ndarray) -> None:
        idx = np.searchsorted(self._bounds, distances_m, side="right")
        inside = (idx % 2) == 1
        bins = idx[inside] // 2
        np.add.at(self.expected, bins, 1)
        np.add.at(self.received, bins, received[inside].astype(np.int64))

    def prr(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(self.expected > 0, self.received / np.maximum(self.expected, 1),
                            np.nan)


def accumulate(records, config: SimConfig) -> PrrAccumulator:
    """Fold record batches (anything with .distance_m and .received arrays)."""
    acc = PrrAccumulator.from_config(config)
    for batch in records:
        acc.add(np.asarray(batch.distance_m, dtype=float),
                np.asarray(batch.received, dtype=bool))
    return acc


@dataclass
class AggregateResult:
    scheduler: str
    centers: np.ndarray
    mean_prr: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    n_seeds: int


def aggregate(results, config: SimConfig) -> AggregateResult:
    """Across-seed mean PRR per bin with a z * std / sqrt(n) band, clamped to [0, 1].

    results are SimResult-likes (same scheduler, one per seed).  A single seed
    yields a zero-width band, flagged by n_seeds = 1.
    """
    results = list(results)
    if not results:
        raise ValueError("no runs to aggregate")
    names = {r.scheduler for r in results}
    if len(names) != 1:
        raise ValueError(f"refusing to aggregate across schedulers: {sorted(names)}")
    centers = np.asarray(config.prr_bin_centers_m, dtype=float)
    for r in results:
        if not np.array_equal(np.asarray(r.bin_centers, dtype=float), centers):
            raise ValueError("run uses different distance bins than the config")
    prr = np.vstack([r.prr for r in results])
    n = len(results)
    with warnings.catch_warnings():
        # bins observed by no seed stay NaN and bins observed by one seed get a
        # zero-width band via the counts > 1 gate; silence the nan-slice noise
        warnings.simplefilter("ignore", RuntimeWarning)
        mean = np.nanmean(prr, axis=0) if np.isnan(prr).any() else prr.mean(axis=0)
        if n > 1:
            counts = np.sum(~np.isnan(prr), axis=0)
            std = np.nanstd(prr, axis=0, ddof=1)
    if n > 1:
        half = np.where(counts > 1, config.ci_z_score * std / np.sqrt(np.maximum(counts, 1)), 0.0)
    else:
        half = np.zeros_like(mean)
    return AggregateResult(
        scheduler=names.pop(),
        centers=centers,
        mean_prr=mean,
        ci_low=np.clip(mean - half, 0.0, 1.0),
        ci_high=np.clip(mean + half, 0.0, 1.0),
        n_seeds=n,
    )


# ---- CSV formats ----

def _fmt(x: float) -> str:
    return "" if (x is None or math.isnan(x)) else f"{x:.6f}"


def _fmt_center(x: float) -> str:
    return f"{x:g}"


def write_run_csv(result, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUN_HEADER)
        prr = result.prr
        for b, center in enumerate(result.bin_centers):
            w.writerow([result.scheduler, result.seed, _fmt_center(center),
                        int(result.expected[b]), int(result.received[b]),
                        _fmt(float(prr[b]))])


@dataclass
class RunRow:
    scheduler: str
    seed: int
    bin_centers: np.ndarray
    expected: np.ndarray
    received: np.ndarray

    @property
    def prr(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(self.expected > 0,
                            self.received / np.maximum(self.expected, 1), np.nan)


def read_run_csv(path) -> list:
    """Parse one per-run file into RunRow groups (one per scheduler, seed pair)."""
    groups = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1:
                if row != RUN_HEADER:
                    raise ValueError(f"{path}:{lineno}: expected header {RUN_HEADER}, got {row}")
                continue
            if len(row) != len(RUN_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(RUN_HEADER)} fields, got {len(row)}")
            try:
                key = (row[0], int(row[1]))
                center = float(row[2])
                expected = int(row[3])
                received = int(row[4])
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from None
            if received > expected or expected < 0:
                raise ValueError(f"{path}:{lineno}: received {received} exceeds expected {expected}")
            groups.setdefault(key, []).append((center, expected, received))
    out = []
    for (scheduler, seed), rows in groups.items():
        centers = np.array([r[0] for r in rows])
        out.append(RunRow(scheduler, seed, centers,
                          np.array([r[1] for r in rows], dtype=np.int64),
                          np.array([r[2] for r in rows], dtype=np.int64)))
    return out


def write_summary_csv(agg: AggregateResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_HEADER)
        for b, center in enumerate(agg.centers):
            w.writerow([agg.scheduler, _fmt_center(center), _fmt(float(agg.mean_prr[b])),
                        _fmt(float(agg.ci_low[b])), _fmt(float(agg.ci_high[b])), agg.n_seeds])


def write_comparison_csv(aggs, path) -> None:
    """Side-by-side mean PRR table, one column per scheduler (sorted by name)."""
    aggs = sorted(aggs, key=lambda a: a.scheduler)
    if not aggs:
        raise ValueError("nothing to compare")
    centers = aggs[0].centers
    for a in aggs:
        if not np.array_equal(a.centers, centers):
            raise ValueError("schedulers were aggregated over different distance bins")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_center_m"] + [a.scheduler for a in aggs])
        for b, center in enumerate(centers):
            w.writerow([_fmt_center(center)] + [_fmt(float(a.mean_prr[b])) for a in aggs])
