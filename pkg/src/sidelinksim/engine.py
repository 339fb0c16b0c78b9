"""Subframe-by-subframe simulation driver.

Each 1 ms subframe advances in a fixed order: move vehicles, transmit on the
subchannels allocated to this subframe, evaluate reception at every other
vehicle inside the evaluation range, append the subframe's per-subchannel
power totals to every listener's sensing history, then hand expired
reservations to the active scheduler.  New allocations take effect at the
vehicle's next pass over its (new) subframe; a reservation never transmits
twice in one subframe.

One PCG64 generator seeded per run drives bootstrap, shadowing, and scheduler
draws in a fixed order, so a (config, scheduler, seed) triple reproduces
bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import metrics, mobility, schedulers
from .channel import ShadowingField, dbm_to_mw, reference_pathloss_db
from .config import SimConfig, flat_index, validate

TRACE_HEADER = "time_ms,tx_id,rx_id,distance_m,sinr_db,received,blocked_half_duplex"


@dataclass
class RecordBatch:
    """All reception evaluations of one subframe, column-wise."""

    time_ms: int
    tx_id: np.ndarray
    rx_id: np.ndarray
    distance_m: np.ndarray
    sinr_db: np.ndarray
    received: np.ndarray
    blocked_half_duplex: np.ndarray


@dataclass
class RunStats:
    tx_events: int = 0
    records: int = 0
    half_duplex_received: int = 0
    reselections: int = 0
    lifetimes_ms: list = field(default_factory=list)
    mode4_candidates: list = field(default_factory=list)
    mode4_selectable: list = field(default_factory=list)


@dataclass
class SimResult:
    scheduler: str
    seed: int
    bin_centers: np.ndarray
    bin_halfwidth: float
    expected: np.ndarray
    received: np.ndarray
    stats: RunStats

    @property
    def prr(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(self.expected > 0,
                            self.received / np.maximum(self.expected, 1), np.nan)


class World:
    """Mutable engine state; exposed for tests and demos via the on_subframe hook."""

    def __init__(self, config: SimConfig, rng: np.random.Generator):
        n = config.num_vehicles
        s = config.num_subchannels
        self.config = config
        self.rng = rng
        self.fleet = mobility.init_fleet(config, rng)
        perm = rng.permutation(s)
        self.alloc_flat = perm[np.arange(n) % s]
        self.alloc_sf = self.alloc_flat // config.num_subbands
        self.alloc_sb = self.alloc_flat % config.num_subbands
        # desynchronized start: expiries spread over one maximal SPS period
        self.expiry_ms = rng.uniform(0.0, config.sps_period_max_s * 1000.0, size=n)
        self.sensing = np.full(
            (n, config.num_subframes, config.num_subbands, config.sensing_window_slots),
            np.nan)
        self.shadowing = ShadowingField(self.fleet, config, rng)
        self.stats = RunStats()

    def sensing_state(self, v: int) -> schedulers.SensingState:
        return schedulers.SensingState(self.sensing[v], int(self.alloc_sf[v]))

    def window_averages(self, ids) -> np.ndarray:
        """Per-subchannel windowed mean power for each vehicle in ids, NaN if unmeasured."""
        block = self.sensing[np.asarray(ids)]
        measured = ~np.isnan(block)
        counts = measured.sum(axis=-1)
        sums = np.where(measured, block, 0.0).sum(axis=-1)
        with np.errstate(invalid="ignore"):
            avg = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
        return avg.reshape(len(block), -1)

    def apply(self, decision: schedulers.AllocationDecision, now_ms: int) -> None:
        v = decision.vehicle_id
        fi = flat_index(decision.resource, self.config)
        self.alloc_flat[v] = fi
        self.alloc_sf[v] = fi // self.config.num_subbands
        self.alloc_sb[v] = fi % self.config.num_subbands
        self.expiry_ms[v] = decision.sps_expiry_ms
        self.stats.reselections += 1
        self.stats.lifetimes_ms.append(decision.sps_expiry_ms - now_ms)


def bootstrap(config: SimConfig, rng: np.random.Generator) -> World:
    return World(config, rng)


def run(config: SimConfig, scheduler: str = "mode4-sps", seed: int = 0,
        trace=None, record_sink=None, on_subframe=None) -> SimResult:
    """Simulate one full run and return binned PRR counters plus run statistics.

    trace: optional path; writes one CSV row per reception evaluation.
    record_sink: optional callable fed a RecordBatch per subframe.
    on_subframe: optional callable (world, t_ms), invoked after each subframe.
    """
    if scheduler not in schedulers.SCHEDULER_NAMES:
        raise ValueError(f"unknown scheduler {scheduler!r}; "
                         f"valid names: {', '.join(schedulers.SCHEDULER_NAMES)}")
    validate(config)
    rng = np.random.default_rng(seed)
    world = World(config, rng)
    acc = metrics.PrrAccumulator.from_config(config)
    stats = world.stats

    nsf = config.num_subframes
    nsb = config.num_subbands
    slots = config.sensing_window_slots
    noise_mw = float(dbm_to_mw(config.noise_power_dbm))
    eirp = config.tx_power_dbm + config.antenna_gain_tx_db + config.antenna_gain_rx_db
    pl0 = reference_pathloss_db(config)
    slope = 10.0 * config.pathloss_exponent
    d0 = config.pathloss_ref_dist_m
    thr_db = config.sinr_threshold_db
    max_range = config.max_eval_range_m
    mode4 = scheduler == "mode4-sps"
    want_records = record_sink is not None or trace is not None

    trace_fh = open(trace, "w") if trace is not None else None
    if trace_fh is not None:
        trace_fh.write(TRACE_HEADER + "\n")

    try:
        for t in range(config.sim_duration_ms):
            sf = t % nsf
            slot = (t // nsf) % slots
            world.fleet = mobility.advance(world.fleet, 1e-3, config)

            tx = np.flatnonzero(world.alloc_sf == sf)
            k = tx.size
            if k:
                shadow = world.shadowing.update_rows(tx, t)
                d = mobility.pair_distances(world.fleet, tx, config)
                pl = pl0 + slope * np.log10(np.maximum(d, d0) / d0)
                p_mw = 10.0 ** ((eirp - pl - shadow) / 10.0)
                band = world.alloc_sb[tx]
                btot = np.zeros((nsb, len(world.fleet)))
                for b in range(nsb):
                    sel = band == b
                    if sel.any():
                        btot[b] = p_mw[sel].sum(axis=0)
                # measured power rides on the thermal noise floor, so a quiet
                # subchannel never reads below it
                world.sensing[:, sf, :, slot] = btot.T + noise_mw
                world.sensing[tx, sf, :, slot] = np.nan

                interf = btot[band] - p_mw
                np.maximum(interf, 0.0, out=interf)
                with np.errstate(divide="ignore"):
                    sinr_db = 10.0 * np.log10(p_mw / (noise_mw + interf))
                eligible = d < max_range
                eligible[np.arange(k), tx] = False
                row, rx = np.nonzero(eligible)
                d_s = d[row, rx]
                sinr_s = sinr_db[row, rx]
                is_tx = np.zeros(len(world.fleet), dtype=bool)
                is_tx[tx] = True
                blocked = is_tx[rx]
                received = ~blocked & (sinr_s >= thr_db)
                acc.add(d_s, received)
                stats.tx_events += k
                stats.records += rx.size
                stats.half_duplex_received += int(np.count_nonzero(received & blocked))
                if want_records:
                    batch = RecordBatch(t, tx[row], rx, d_s, sinr_s, received, blocked)
                    if record_sink is not None:
                        record_sink(batch)
                    if trace_fh is not None:
                        lines = [
                            f"{t},{a},{b_},{dd:.2f},{ss:.3f},{int(rv)},{int(bl)}"
                            for a, b_, dd, ss, rv, bl in zip(
                                batch.tx_id, batch.rx_id, d_s, sinr_s, received, blocked)
                        ]
                        if lines:
                            trace_fh.write("\n".join(lines) + "\n")
            else:
                world.sensing[:, sf, :, slot] = noise_mw

            due = world.expiry_ms <= t
            if mode4 and t < config.sensing_window_ms:
                due = False
                ids = ()
            else:
                ids = np.flatnonzero(due)
            if len(ids):
                if mode4:
                    for v in ids:
                        out = schedulers.mode4_select(int(v), t, world.sensing_state(int(v)),
                                                      rng, config)
                        world.apply(out.decision, t)
                        stats.mode4_candidates.append(out.n_candidates)
                        stats.mode4_selectable.append(out.n_selectable)
                elif scheduler == "mode3-minpower":
                    reports = world.window_averages(ids)
                    for dec in schedulers.mode3_min_power(ids, t, reports, rng, config):
                        world.apply(dec, t)
                else:
                    for dec in schedulers.mode3_max_reuse(ids, t, world.fleet,
                                                          world.alloc_flat, rng, config):
                        world.apply(dec, t)

            if on_subframe is not None:
                on_subframe(world, t)
    finally:
        if trace_fh is not None:
            trace_fh.close()

    return SimResult(
        scheduler=scheduler,
        seed=seed,
        bin_centers=np.asarray(config.prr_bin_centers_m, dtype=float),
        bin_halfwidth=config.prr_bin_halfwidth_m,
        expected=acc.expected,
        received=acc.received,
        stats=stats,
    )
