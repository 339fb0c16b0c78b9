"""Link budget and correlated shadowing.

Traces received power against distance under the log-distance pathloss model,
finds the noise-limited decoding range for the 3.98 dB SINR threshold, and
shows that per-link shadowing decorrelates with relative displacement (10 m
correlation distance, 7 dB stationary spread).
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sidelinksim import SimConfig
from sidelinksim.channel import (evaluate_reception, new_link, pathloss_db,
                                 rx_power_dbm, update_shadowing)

OUT = Path(__file__).resolve().parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    cfg = SimConfig()
    eirp = cfg.tx_power_dbm + cfg.antenna_gain_tx_db + cfg.antenna_gain_rx_db

    d = np.logspace(0, np.log10(4000.0), 400)
    # rx_power_dbm adds both antenna gains itself, so feed it the raw tx power
    rx = rx_power_dbm(cfg.tx_power_dbm, pathloss_db(d, cfg), 0.0, cfg)
    snr = rx - cfg.noise_power_dbm
    # largest distance still decoding without any interference or shadowing
    limit = d[snr >= cfg.sinr_threshold_db][-1]

    print(f"EIRP {eirp:.0f} dBm, pathloss {pathloss_db(10.0, cfg):.2f} dB at 10 m, "
          f"noise {cfg.noise_power_dbm:.2f} dBm")
    print(f"received power at 100 m: "
          f"{float(rx_power_dbm(cfg.tx_power_dbm, pathloss_db(100.0, cfg), 0.0, cfg)):.2f} dBm")
    print(f"noise-limited decoding range at {cfg.sinr_threshold_db} dB: ~{limit:.0f} m")

    out = evaluate_reception(-90.0, [-95.0, -101.0], False, cfg)
    print(f"one -90 dBm signal against -95 and -101 dBm interferers: "
          f"SINR {out.sinr_db:.2f} dB, received={out.received}")
    out = evaluate_reception(-60.0, [], True, cfg)
    print(f"same-subframe transmitter as receiver: received={out.received} "
          f"(half-duplex), notional SINR {out.sinr_db:.1f} dB")

    # one link, 1 m relative steps: an AR(1) walk in the shadowing value
    rng = np.random.default_rng(11)
    n = 20000
    trace = np.empty(n)
    link = update_shadowing(new_link(0, 1), (0.0, 0.0), (0.0, 4.0), rng, cfg)
    x = 0.0
    for k in range(n):
        x += 1.0
        link = update_shadowing(link, (0.0, 0.0), (x % cfg.road_length_m, 4.0), rng, cfg)
        trace[k] = link.shadow_db
    lags = np.arange(0, 41)
    ac = np.array([1.0 if L == 0 else float(np.corrcoef(trace[:-L], trace[L:])[0, 1])
                   for L in lags])
    print(f"shadowing trace: std {trace.std():.2f} dB (target {cfg.shadow_std_db}), "
          f"autocorrelation at 10 m {ac[10]:.3f} (exp(-1) = {math.exp(-1):.3f})")

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 3.4))
    ax1.semilogx(d, rx, label="received power")
    ax1.axhline(cfg.noise_power_dbm, color="grey", ls=":", label="noise floor")
    ax1.axhline(cfg.noise_power_dbm + cfg.sinr_threshold_db, color="grey", ls="--",
                label="decode threshold")
    ax1.axvline(limit, color="tab:red", ls=":", label=f"range ~{limit:.0f} m")
    ax1.set_xlabel("distance [m]")
    ax1.set_ylabel("power [dBm]")
    ax1.set_title("link budget vs distance")
    ax1.legend(fontsize=8)

    ax2.plot(lags, ac, label="measured")
    ax2.plot(lags, np.exp(-lags / cfg.shadow_corr_dist_m), "k--",
             label="exp(-d / 10 m)")
    ax2.set_xlabel("relative displacement [m]")
    ax2.set_ylabel("autocorrelation")
    ax2.set_title("shadowing decorrelation")
    ax2.legend()
    fig.tight_layout()
    fig.savefig(OUT / "channel.png", dpi=150)
    print(f"wrote {OUT / 'channel.png'}")


if __name__ == "__main__":
    main()
