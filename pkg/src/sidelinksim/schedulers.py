"""Subchannel allocation policies.

Three policies share one decision type.  The two mode-3 policies run inside
the infrastructure and may see requester measurement reports or the full
holder map; the mode-4 baseline is a pure function of one vehicle's own
sensing history, so it can never peek at hidden simulator state.

Equal-merit alternatives are resolved uniformly at random: mode-4 picks
uniformly among its candidate set, and the mode-3 policies shuffle the
subchannel axis (seeded by the run generator) before matching so that exact
cost ties do not collapse onto low subchannel indices fleet-wide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import assignment, mobility
from .channel import mw_to_dbm
from .config import ResourceId, SimConfig, from_flat

SCHEDULER_NAMES = ("mode3-minpower", "mode3-maxreuse", "mode4-sps")


@dataclass
class AllocationDecision:
    vehicle_id: int
    resource: ResourceId
    sps_expiry_ms: float


@dataclass
class SensingState:
    """One vehicle's private view of the band.

    samples[sf, sb, k] is the k-th most recent total received power (linear
    mW, riding on the thermal noise floor) measured on subchannel (sf, sb);
    NaN marks slots not yet measured or blanked because the vehicle itself
    transmitted in that subframe.
    """

    samples: np.ndarray
    own_tx_subframe: int

    def average_linear(self) -> np.ndarray:
        """Windowed mean per subchannel, flattened subframe-major; NaN if unmeasured."""
        measured = ~np.isnan(self.samples)
        counts = measured.sum(axis=-1)
        sums = np.where(measured, self.samples, 0.0).sum(axis=-1)
        with np.errstate(invalid="ignore"):
            avg = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
        return avg.reshape(-1)


@dataclass
class Mode4Outcome:
    decision: AllocationDecision
    n_candidates: int
    n_selectable: int


def _lifetime_ms(rng: np.random.Generator, config: SimConfig) -> float:
    return rng.uniform(config.sps_period_min_s, config.sps_period_max_s) * 1000.0


def candidate_floor(n_selectable: int, config: SimConfig) -> int:
    # epsilon guards against 0.2 * 295 = 59.000000000000004 rounding up
    return math.ceil(config.mode4_candidate_fraction * n_selectable - 1e-9)


def mode4_select(vehicle_id: int, now_ms: float, sensing: SensingState,
                 rng: np.random.Generator, config: SimConfig) -> Mode4Outcome:
    """Sensing-based semi-persistent selection.

    Exclude the vehicle's own transmit subframe and anything never measured,
    then lift the power threshold in fixed steps until the quiet candidate set
    reaches the required fraction of the selectable set, and pick uniformly.
    """
    avg_dbm = mw_to_dbm(sensing.average_linear())
    selectable = np.ones(config.num_subchannels, dtype=bool)
    own = sensing.own_tx_subframe * config.num_subbands
    selectable[own:own + config.num_subbands] = False
    selectable &= ~np.isnan(avg_dbm)
    n_sel = int(np.count_nonzero(selectable))
    if n_sel == 0:
        raise ValueError(f"vehicle {vehicle_id} has an empty sensing window")
    need = candidate_floor(n_sel, config)
    threshold = config.mode4_rsrp_threshold_init_dbm
    while True:
        cand = selectable & (avg_dbm <= threshold)
        n_cand = int(np.count_nonzero(cand))
        if n_cand >= need:
            break
        threshold += config.mode4_threshold_step_db
    choice = np.flatnonzero(cand)[rng.integers(n_cand)]
    decision = AllocationDecision(vehicle_id, from_flat(int(choice), config),
                                  now_ms + _lifetime_ms(rng, config))
    return Mode4Outcome(decision, n_cand, n_sel)


def _chunks(batch, size):
    for k in range(0, len(batch), size):
        yield batch[k:k + size]


def _permuted_min(costs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    perm = rng.permutation(costs.shape[1])
    return perm[assignment.solve_min(costs[:, perm]).cols]


def _permuted_max(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    perm = rng.permutation(weights.shape[1])
    return perm[assignment.solve_max(weights[:, perm]).cols]


def mode3_min_power(batch, now_ms: float, reports: np.ndarray,
                    rng: np.random.Generator, config: SimConfig) -> list:
    """Match requesters to the subchannels they hear least.

    reports[k] is requester batch[k]'s per-subchannel average received power
    (linear, NaN where unmeasured); rows follow batch order.  Unmeasured
    entries are filled with the row median so they neither attract nor repel
    the matching.  Occupancy elsewhere is invisible here; reuse emerges from
    the power measurements alone.
    """
    batch = [int(v) for v in batch]
    decisions = []
    for chunk_start in range(0, len(batch), config.num_subchannels):
        chunk = batch[chunk_start:chunk_start + config.num_subchannels]
        costs = np.array(reports[chunk_start:chunk_start + len(chunk)], dtype=float)
        for r in range(costs.shape[0]):
            measured = ~np.isnan(costs[r])
            fill = float(np.median(costs[r][measured])) if measured.any() else 0.0
            costs[r][~measured] = fill
        cols = _permuted_min(costs, rng)
        for v, col in zip(chunk, cols):
            decisions.append(AllocationDecision(v, from_flat(int(col), config),
                                                now_ms + _lifetime_ms(rng, config)))
    return decisions


def mode3_max_reuse(batch, now_ms: float, fleet: mobility.Fleet, alloc_flat: np.ndarray,
                    rng: np.random.Generator, config: SimConfig) -> list:
    """Match requesters to the subchannels whose nearest holder is farthest.

    weight(v, s) = min distance from v to any current holder of s, ignoring
    the batch itself (its holdings are being vacated); unheld subchannels
    weigh the full road length.
    """
    batch = sorted(int(v) for v in batch)
    in_batch = np.zeros(len(fleet), dtype=bool)
    in_batch[batch] = True
    keep = ~in_batch
    holders = alloc_flat[keep]
    decisions = []
    for chunk in _chunks(batch, config.num_subchannels):
        weights = np.full((len(chunk), config.num_subchannels), config.road_length_m)
        for r, v in enumerate(chunk):
            dist = mobility.distances_from(fleet, v, config)[keep]
            np.minimum.at(weights[r], holders, dist)
        cols = _permuted_max(weights, rng)
        for v, col in zip(chunk, cols):
            decisions.append(AllocationDecision(v, from_flat(int(col), config),
                                                now_ms + _lifetime_ms(rng, config)))
    return decisions
