"""Link-level radio model.

Pathloss is log-distance with a free-space anchor at the reference distance:

    PL(d) = 20 log10(4 pi d0 f / c) + 10 n log10(max(d, d0) / d0)

Shadowing is log-normal with exponential spatial autocorrelation, advanced
lazily per link as an AR(1) process in the pair's relative displacement:

    rho = exp(-delta_d / d_corr),   S' = rho S + sqrt(1 - rho^2) N(0, sigma^2)

Reception succeeds when SINR over (noise + co-subchannel interference) meets
the threshold, unless the receiver itself transmitted in the same subframe
(half-duplex).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import SimConfig

SPEED_OF_LIGHT = 299_792_458.0


def dbm_to_mw(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def mw_to_dbm(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


def reference_pathloss_db(config: SimConfig) -> float:
    """Free-space loss at the reference distance."""
    d0 = config.pathloss_ref_dist_m
    return 20.0 * math.log10(4.0 * math.pi * d0 * config.carrier_freq_hz / SPEED_OF_LIGHT)


def pathloss_db(d_m, config: SimConfig):
    """Log-distance pathloss; distances below the reference clamp to it."""
    d = np.maximum(np.asarray(d_m, dtype=float), config.pathloss_ref_dist_m)
    return (reference_pathloss_db(config)
            + 10.0 * config.pathloss_exponent * np.log10(d / config.pathloss_ref_dist_m))


def noise_power_dbm(config: SimConfig) -> float:
    """Thermal noise over one subchannel bandwidth plus the receiver noise figure."""
    return config.noise_power_dbm


def rx_power_dbm(tx_power_dbm, pl_db, shadow_db, config: SimConfig):
    return (tx_power_dbm + config.antenna_gain_tx_db + config.antenna_gain_rx_db
            - pl_db - shadow_db)


# ---- reception ----

@dataclass
class ReceptionOutcome:
    received: bool
    sinr_db: float
    blocked_half_duplex: bool


def evaluate_reception(signal_dbm: float, interferer_dbms, rx_is_transmitting: bool,
                       config: SimConfig) -> ReceptionOutcome:
    """Single-link SINR test against all co-subchannel interferers.

    The SINR is reported even for half-duplex blocked receivers, but a blocked
    receiver never counts as received.
    """
    noise_mw = float(dbm_to_mw(config.noise_power_dbm))
    interf_mw = float(np.sum(dbm_to_mw(interferer_dbms))) if len(interferer_dbms) else 0.0
    sinr_db = float(mw_to_dbm(dbm_to_mw(signal_dbm) / (noise_mw + interf_mw)))
    if rx_is_transmitting:
        return ReceptionOutcome(False, sinr_db, True)
    return ReceptionOutcome(sinr_db >= config.sinr_threshold_db, sinr_db, False)


# ---- correlated shadowing, single link ----

class LinkShadowing(NamedTuple):
    """Shadowing state of one unordered vehicle pair.

    Positions are (longitudinal, lateral) at the last update, stored for the
    lower-id endpoint first so that a and b can be passed in either order.
    """

    pair: tuple
    shadow_db: float
    last_pos_a: tuple
    last_pos_b: tuple


def new_link(a_id: int, b_id: int) -> LinkShadowing:
    pair = (a_id, b_id) if a_id <= b_id else (b_id, a_id)
    return LinkShadowing(pair, math.nan, (math.nan, math.nan), (math.nan, math.nan))


def _signed_wrap(dx: float, length: float) -> float:
    return (dx + length / 2.0) % length - length / 2.0


def update_shadowing(link: LinkShadowing, pos_a, pos_b, rng: np.random.Generator,
                     config: SimConfig) -> LinkShadowing:
    """Advance one link to the given endpoint positions and draw a new sample.

    pos_a/pos_b are (longitudinal, lateral) for the pair's endpoints in
    sorted-id order.  The decorrelation driver is the displacement of the
    relative geometry since the previous update; a first update draws fresh
    N(0, sigma^2).
    """
    length = config.road_length_m
    sigma = config.shadow_std_db
    if math.isnan(link.shadow_db):
        sample = rng.normal(0.0, sigma)
        return LinkShadowing(link.pair, sample, tuple(pos_a), tuple(pos_b))
    rel_now = (_signed_wrap(pos_b[0] - pos_a[0], length), pos_b[1] - pos_a[1])
    rel_old = (_signed_wrap(link.last_pos_b[0] - link.last_pos_a[0], length),
               link.last_pos_b[1] - link.last_pos_a[1])
    delta = math.hypot(_signed_wrap(rel_now[0] - rel_old[0], length),
                       rel_now[1] - rel_old[1])
    rho = math.exp(-delta / config.shadow_corr_dist_m)
    sample = rho * link.shadow_db + math.sqrt(1.0 - rho * rho) * rng.normal(0.0, sigma)
    return LinkShadowing(link.pair, sample, tuple(pos_a), tuple(pos_b))


# ---- correlated shadowing, whole fleet ----

class ShadowingField:
    """Pairwise shadowing advanced lazily for one set of transmitters at a time.

    Keeps symmetric n x n matrices of the current sample and the time of the
    last update per pair.  Because lanes and speeds are constant, the relative
    displacement of a pair since its last update depends only on the elapsed
    time and the pair's closing speed, which keeps the row update vectorized.
    """

    def __init__(self, fleet, config: SimConfig, rng: np.random.Generator):
        n = len(fleet)
        self.sigma = config.shadow_std_db
        self.corr = config.shadow_corr_dist_m
        self.length = config.road_length_m
        self.shadow = np.zeros((n, n))
        self.last_t = np.full((n, n), -1, dtype=np.int64)
        # closing speed matrix row: |v_j d_j - v_i d_i| for row vehicle i
        self.vel = fleet.direction * fleet.speed_mps
        self.rng = rng

    def update_rows(self, tx_ids: np.ndarray, t_ms: int) -> np.ndarray:
        """Advance all pairs (tx, *) to time t_ms; return the tx rows."""
        k = tx_ids.shape[0]
        old = self.shadow[tx_ids]
        dt_ms = t_ms - self.last_t[tx_ids]
        fresh = self.last_t[tx_ids] < 0
        closing = np.abs(self.vel[None, :] - self.vel[tx_ids, None])
        moved = np.mod(closing * (dt_ms / 1000.0), self.length)
        np.minimum(moved, self.length - moved, out=moved)
        with np.errstate(invalid="ignore"):
            rho = np.exp(-moved / self.corr)
        rho[fresh] = 0.0
        z = self.rng.standard_normal((k, old.shape[1])) * self.sigma
        rows = rho * old + np.sqrt(1.0 - rho * rho) * z
        # pairs inside the tx set get two draws; keep the lower-id row's so the
        # matrix stays symmetric (tx_ids arrive sorted)
        sub = rows[:, tx_ids]
        upper = np.triu(np.ones((k, k), dtype=bool))
        rows[:, tx_ids] = np.where(upper, sub, sub.T)
        self.shadow[tx_ids, :] = rows
        self.shadow[:, tx_ids] = rows.T
        self.last_t[tx_ids, :] = t_ms
        self.last_t[:, tx_ids] = t_ms
        return rows
