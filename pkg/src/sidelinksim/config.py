"""Simulation parameters, validation, and subchannel index algebra.

The resource grid is one LTE sidelink frame repeating forever: num_subframes
subframes of 1 ms, each split into num_subbands frequency sub-bands.  One
(subframe, sub-band) cell is a subchannel, the unit a scheduler hands out.
Flat subchannel indices are subframe-major, so the sub-bands of one subframe
are adjacent (half-duplex masking then works on contiguous index runs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple

RB_BANDWIDTH_HZ = 180e3  # one LTE resource block
THERMAL_NOISE_DBM_PER_HZ = -174.0


class ConfigError(ValueError):
    """Invalid configuration.  Carries one message per violated invariant."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


class ResourceId(NamedTuple):
    subframe: int
    subband: int


@dataclass(frozen=True)
class SimConfig:
    # resource grid
    num_subframes: int = 100
    num_subbands: int = 3
    rbs_per_subchannel: int = 30
    # traffic
    cam_rate_hz: float = 10.0
    sps_period_min_s: float = 0.5
    sps_period_max_s: float = 1.5
    # radio
    tx_power_dbm: float = 23.0
    antenna_gain_tx_db: float = 3.0
    antenna_gain_rx_db: float = 3.0
    sinr_threshold_db: float = 3.98
    noise_figure_db: float = 9.0
    carrier_freq_hz: float = 5.9e9
    # propagation
    pathloss_exponent: float = 2.27
    pathloss_ref_dist_m: float = 10.0
    shadow_std_db: float = 7.0
    shadow_corr_dist_m: float = 10.0
    # road
    road_length_m: float = 5000.0
    num_lanes: int = 6
    lane_width_m: float = 4.0
    speed_mps: float = 27.78
    num_vehicles: int = 600
    # run
    sim_duration_ms: int = 40000
    prr_bin_centers_m: tuple = (50.0, 100.0, 150.0, 200.0, 250.0, 300.0)
    prr_bin_halfwidth_m: float = 25.0
    # mode-4 sensing
    mode4_rsrp_threshold_init_dbm: float = -110.0
    mode4_threshold_step_db: float = 3.0
    mode4_candidate_fraction: float = 0.2
    sensing_window_ms: int = 1000
    # reporting
    ci_z_score: float = 4.417

    # ---- derived quantities ----

    @property
    def num_subchannels(self) -> int:
        return self.num_subframes * self.num_subbands

    @property
    def subchannel_bandwidth_hz(self) -> float:
        return self.rbs_per_subchannel * RB_BANDWIDTH_HZ

    @property
    def noise_power_dbm(self) -> float:
        return (THERMAL_NOISE_DBM_PER_HZ
                + 10.0 * math.log10(self.subchannel_bandwidth_hz)
                + self.noise_figure_db)

    @property
    def cam_period_ms(self) -> float:
        return 1000.0 / self.cam_rate_hz

    @property
    def sensing_window_slots(self) -> int:
        return self.sensing_window_ms // self.num_subframes

    @property
    def max_eval_range_m(self) -> float:
        return max(self.prr_bin_centers_m) + self.prr_bin_halfwidth_m


def validate(config: SimConfig) -> SimConfig:
    """Check every invariant; raise ConfigError listing all violations."""
    p = []
    c = config

    for name in ("num_subframes", "num_subbands", "rbs_per_subchannel",
                 "num_lanes", "num_vehicles", "sim_duration_ms", "sensing_window_ms"):
        v = getattr(c, name)
        if not isinstance(v, int) or v <= 0:
            p.append(f"{name} must be a positive integer, got {v!r}")

    for name in ("cam_rate_hz", "carrier_freq_hz", "pathloss_ref_dist_m",
                 "road_length_m", "lane_width_m", "speed_mps", "pathloss_exponent",
                 "prr_bin_halfwidth_m", "mode4_threshold_step_db", "ci_z_score"):
        v = getattr(c, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            p.append(f"{name} must be a positive finite number, got {v!r}")

    for name in ("tx_power_dbm", "antenna_gain_tx_db", "antenna_gain_rx_db",
                 "sinr_threshold_db", "noise_figure_db",
                 "mode4_rsrp_threshold_init_dbm"):
        v = getattr(c, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v)):
            p.append(f"{name} must be a finite number, got {v!r}")

    if not (isinstance(c.shadow_std_db, (int, float)) and math.isfinite(c.shadow_std_db)
            and c.shadow_std_db >= 0):
        p.append(f"shadow_std_db must be a finite number >= 0, got {c.shadow_std_db!r}")
    if not (isinstance(c.shadow_corr_dist_m, (int, float)) and math.isfinite(c.shadow_corr_dist_m)
            and c.shadow_corr_dist_m > 0):
        p.append(f"shadow_corr_dist_m must be a positive finite number, got {c.shadow_corr_dist_m!r}")

    # CAM cadence must tile the frame: one transmission opportunity per frame cycle.
    if isinstance(c.num_subframes, int) and c.num_subframes > 0 and c.cam_rate_hz > 0:
        if not math.isclose(c.cam_rate_hz * c.num_subframes, 1000.0, rel_tol=1e-9):
            p.append(f"cam rate/subframe mismatch: cam_rate_hz * num_subframes * 1 ms must "
                     f"equal 1 s, got {c.cam_rate_hz} * {c.num_subframes} ms = "
                     f"{c.cam_rate_hz * c.num_subframes} ms")

    if not (0 < c.sps_period_min_s <= c.sps_period_max_s):
        p.append(f"sps period range must satisfy 0 < min <= max, got "
                 f"[{c.sps_period_min_s}, {c.sps_period_max_s}]")
    elif c.cam_rate_hz > 0 and c.sps_period_min_s < 1.0 / c.cam_rate_hz - 1e-12:
        p.append(f"sps_period_min_s must cover at least one CAM period "
                 f"({1.0 / c.cam_rate_hz} s), got {c.sps_period_min_s}")

    if not (0 < c.mode4_candidate_fraction <= 1):
        p.append(f"mode4_candidate_fraction must be in (0, 1], got {c.mode4_candidate_fraction!r}")

    if isinstance(c.sensing_window_ms, int) and isinstance(c.num_subframes, int) \
            and c.sensing_window_ms > 0 and c.num_subframes > 0:
        if c.sensing_window_ms % c.num_subframes != 0:
            p.append(f"sensing_window_ms must be a multiple of the frame length "
                     f"({c.num_subframes} ms), got {c.sensing_window_ms}")

    centers = tuple(c.prr_bin_centers_m)
    if len(centers) == 0:
        p.append("prr_bin_centers_m must not be empty")
    else:
        if any(not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0) for x in centers):
            p.append(f"prr_bin_centers_m must be positive finite numbers, got {centers}")
        elif any(b <= a for a, b in zip(centers, centers[1:])):
            p.append(f"prr_bin_centers_m must be strictly increasing, got {centers}")
        elif math.isfinite(c.prr_bin_halfwidth_m) and c.prr_bin_halfwidth_m > 0:
            gaps = [b - a for a, b in zip(centers, centers[1:])]
            if gaps and 2 * c.prr_bin_halfwidth_m > min(gaps) + 1e-12:
                p.append(f"prr bins overlap: halfwidth {c.prr_bin_halfwidth_m} exceeds half "
                         f"the minimum center spacing {min(gaps)}")

    if p:
        raise ConfigError(p)
    return config


# ---- flat index algebra ----

def flat_index(resource: ResourceId, config: SimConfig) -> int:
    sf, sb = resource
    if not (0 <= sf < config.num_subframes):
        raise ValueError(f"subframe {sf} out of range [0, {config.num_subframes})")
    if not (0 <= sb < config.num_subbands):
        raise ValueError(f"subband {sb} out of range [0, {config.num_subbands})")
    return sf * config.num_subbands + sb


def from_flat(index: int, config: SimConfig) -> ResourceId:
    if not (0 <= index < config.num_subchannels):
        raise ValueError(f"flat index {index} out of range [0, {config.num_subchannels})")
    return ResourceId(index // config.num_subbands, index % config.num_subbands)


# ---- flat key = value config files ----

_TUPLE_FIELDS = {"prr_bin_centers_m"}


def _field_types() -> dict:
    return {f.name: f.type for f in fields(SimConfig)}


def _parse_value(name: str, ftype: str, raw: str):
    if name in _TUPLE_FIELDS:
        items = [s.strip() for s in raw.split(",") if s.strip()]
        return tuple(float(s) for s in items)
    if ftype == "int":
        return int(raw)
    return float(raw)


def load_config(path) -> SimConfig:
    """Read a flat key = value file (``#`` comments, blank lines ignored).

    Unknown keys and malformed values raise ConfigError with the line number.
    Omitted keys keep their defaults.  The result is validated.
    """
    types = _field_types()
    overrides = {}
    problems = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                problems.append(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
                continue
            key, raw = (s.strip() for s in text.split("=", 1))
            if key not in types:
                problems.append(f"{path}:{lineno}: unknown key {key!r}")
                continue
            try:
                overrides[key] = _parse_value(key, types[key], raw)
            except ValueError:
                problems.append(f"{path}:{lineno}: cannot parse value for {key!r}: {raw!r}")
    if problems:
        raise ConfigError(problems)
    return validate(SimConfig(**overrides))


def save_config(config: SimConfig, path) -> None:
    """Write every field as a key = value line (round-trips through load_config)."""
    lines = []
    for f in fields(SimConfig):
        v = getattr(config, f.name)
        if f.name in _TUPLE_FIELDS:
            v = ", ".join(repr(float(x)) for x in v)
        lines.append(f"{f.name} = {v}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
