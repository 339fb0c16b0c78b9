"""Fleet layout and motion on the circular six-lane highway.

Vehicles are dealt round-robin onto lanes, the first half of the lanes drive
one way and the rest the other, and longitudinal positions wrap at the road
end.  Distances combine the wrapped longitudinal gap with the lane offset.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sidelinksim import SimConfig
from sidelinksim.mobility import advance, distances_from, init_fleet, wrap_delta

OUT = Path(__file__).resolve().parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    cfg = SimConfig(num_vehicles=60, road_length_m=2000.0)
    rng = np.random.default_rng(3)
    fleet = init_fleet(cfg, rng)

    fwd = int(np.count_nonzero(fleet.direction > 0))
    print(f"{len(fleet)} vehicles on {cfg.num_lanes} lanes of a "
          f"{cfg.road_length_m:.0f} m ring; {fwd} forward, {len(fleet) - fwd} reverse")
    print(f"lane occupancy: {np.bincount(fleet.lane, minlength=cfg.num_lanes).tolist()}")

    # wrap-around: two vehicles near opposite ends of the ring are neighbours
    print(f"wrap_delta(1950, 30) on a 2000 m ring = "
          f"{wrap_delta(1950.0, 30.0, cfg.road_length_m):.0f} m")

    # track a head-on pair for a minute; their gap closes at ~55.6 m/s
    a = int(np.flatnonzero(fleet.direction > 0)[0])
    b = int(np.flatnonzero(fleet.direction < 0)[0])
    times = np.arange(0, 60.0, 0.1)
    pos = np.empty((times.size, len(fleet)))
    gap = np.empty(times.size)
    f = fleet
    for k, _ in enumerate(times):
        pos[k] = f.pos_m
        gap[k] = distances_from(f, a, cfg)[b]
        f = advance(f, 0.1, cfg)
    print(f"tracked pair ({a} fwd, {b} rev): gap {gap[0]:.0f} m at t=0, "
          f"minimum {gap.min():.1f} m, {gap[-1]:.0f} m at t=60 s")

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 3.2))
    y = fleet.lane * cfg.lane_width_m
    ax1.scatter(fleet.pos_m[fleet.direction > 0], y[fleet.direction > 0],
                marker=">", label="forward")
    ax1.scatter(fleet.pos_m[fleet.direction < 0], y[fleet.direction < 0],
                marker="<", label="reverse")
    ax1.set_xlabel("longitudinal position [m]")
    ax1.set_ylabel("lateral offset [m]")
    ax1.set_title("fleet snapshot at t = 0")
    ax1.legend(loc="upper right")

    for v in (a, b):
        ax2.plot(times, pos[:, v], label=f"vehicle {v} ({'fwd' if fleet.direction[v] > 0 else 'rev'})")
    ax2.plot(times, gap, "k--", label="pair distance")
    ax2.set_xlabel("time [s]")
    ax2.set_ylabel("position / distance [m]")
    ax2.set_title("wrapping trajectories and pair distance")
    ax2.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(OUT / "mobility.png", dpi=150)
    print(f"wrote {OUT / 'mobility.png'}")


if __name__ == "__main__":
    main()
