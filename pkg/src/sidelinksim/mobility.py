"""Wrap-around multi-lane freeway kinematics.

Vehicles move at constant speed on a circular road.  Lanes in the first half
of the lane set head in the +1 direction, the rest in -1.  Distances combine
the minimal longitudinal separation on the loop with the fixed lateral lane
offset.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import SimConfig


class VehicleKinematics(NamedTuple):
    vehicle_id: int
    longitudinal_pos_m: float
    lane: int
    direction: int
    speed_mps: float


@dataclass
class Fleet:
    """Column arrays, one entry per vehicle; vehicle id is the array index."""

    pos_m: np.ndarray      # longitudinal position in [0, road_length)
    lane: np.ndarray
    direction: np.ndarray  # +1 or -1
    speed_mps: np.ndarray

    def __len__(self) -> int:
        return self.pos_m.shape[0]

    def vehicle(self, i: int) -> VehicleKinematics:
        return VehicleKinematics(i, float(self.pos_m[i]), int(self.lane[i]),
                                 int(self.direction[i]), float(self.speed_mps[i]))

    def lateral_m(self, config: SimConfig) -> np.ndarray:
        return self.lane * config.lane_width_m


def init_fleet(config: SimConfig, rng: np.random.Generator) -> Fleet:
    """Round-robin vehicles over lanes, longitudinal positions uniform on the loop."""
    n = config.num_vehicles
    lane = np.arange(n, dtype=np.int64) % config.num_lanes
    direction = np.where(lane < config.num_lanes // 2, 1, -1).astype(np.int64)
    pos = rng.uniform(0.0, config.road_length_m, size=n)
    speed = np.full(n, config.speed_mps)
    return Fleet(pos_m=pos, lane=lane, direction=direction, speed_mps=speed)


def advance(fleet: Fleet, dt_s: float, config: SimConfig) -> Fleet:
    pos = np.mod(fleet.pos_m + fleet.direction * fleet.speed_mps * dt_s,
                 config.road_length_m)
    return Fleet(pos_m=pos, lane=fleet.lane, direction=fleet.direction,
                 speed_mps=fleet.speed_mps)


def wrap_delta(x_a, x_b, road_length_m: float):
    """Minimal longitudinal separation |x_a - x_b| on the loop."""
    d = np.abs(np.asarray(x_a) - np.asarray(x_b))
    return np.minimum(d, road_length_m - d)


def distance(a: VehicleKinematics, b: VehicleKinematics, config: SimConfig) -> float:
    dx = wrap_delta(a.longitudinal_pos_m, b.longitudinal_pos_m, config.road_length_m)
    dy = (a.lane - b.lane) * config.lane_width_m
    return float(np.hypot(dx, dy))


def distances_from(fleet: Fleet, i: int, config: SimConfig) -> np.ndarray:
    """Distance from vehicle i to every vehicle (index i maps to 0)."""
    dx = wrap_delta(fleet.pos_m[i], fleet.pos_m, config.road_length_m)
    dy = (fleet.lane[i] - fleet.lane) * config.lane_width_m
    return np.hypot(dx, dy)


def pair_distances(fleet: Fleet, ids, config: SimConfig) -> np.ndarray:
    """Distances from each vehicle in ids to every vehicle, shape (len(ids), n)."""
    ids = np.asarray(ids)
    dx = np.abs(fleet.pos_m[ids, None] - fleet.pos_m[None, :])
    np.minimum(dx, config.road_length_m - dx, out=dx)
    dy = (fleet.lane[ids, None] - fleet.lane[None, :]) * config.lane_width_m
    return np.hypot(dx, dy)
