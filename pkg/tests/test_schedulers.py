import math

import numpy as np
import pytest

from sidelinksim.channel import dbm_to_mw
from sidelinksim.config import SimConfig, from_flat
from sidelinksim.mobility import Fleet
from sidelinksim.schedulers import (
    SCHEDULER_NAMES,
    SensingState,
    candidate_floor,
    mode3_max_reuse,
    mode3_min_power,
    mode4_select,
)

CFG = SimConfig()


def _sensing(avg_dbm, own_sf=0, cfg=CFG):
    """SensingState whose per-subchannel window average is avg_dbm (flat, dBm)."""
    flat = np.asarray(avg_dbm, dtype=float)
    samples = np.repeat(dbm_to_mw(flat), cfg.sensing_window_slots).reshape(
        cfg.num_subframes, cfg.num_subbands, cfg.sensing_window_slots)
    samples[np.isnan(flat).reshape(cfg.num_subframes, cfg.num_subbands)] = np.nan
    return SensingState(samples, own_sf)


def test_scheduler_names_stable():
    assert SCHEDULER_NAMES == ("mode3-minpower", "mode3-maxreuse", "mode4-sps")


def test_candidate_floor_values():
    assert candidate_floor(300, CFG) == 60
    assert candidate_floor(297, CFG) == 60   # 59.4 rounds up
    assert candidate_floor(295, CFG) == 59   # 59.000000000000004 must not
    assert candidate_floor(10, CFG) == 2
    assert candidate_floor(5, CFG) == 1
    assert candidate_floor(1, CFG) == 1


# ---- mode-4 ----

def test_mode4_uniform_field_raises_threshold():
    # all averages -80 dBm: threshold climbs from -110 until everything passes
    out = mode4_select(0, 1000.0, _sensing(np.full(300, -80.0)), np.random.default_rng(0), CFG)
    assert out.n_selectable == 297  # own subframe excluded
    assert out.n_candidates == 297
    assert out.decision.resource.subframe != 0


def test_mode4_quiet_subset_passes_first_try():
    avg = np.full(300, -70.0)
    avg[3:103] = -120.0  # 100 quiet subchannels clear of own subframe 0
    for k in range(20):
        out = mode4_select(0, 0.0, _sensing(avg), np.random.default_rng(k), CFG)
        assert out.n_candidates == 100
        flat = out.decision.resource.subframe * 3 + out.decision.resource.subband
        assert 3 <= flat < 103


def test_mode4_single_candidate_is_forced():
    cfg = SimConfig(mode4_candidate_fraction=1e-3)  # floor of 1
    avg = np.full(300, -70.0)
    avg[150] = -120.0
    for k in range(20):
        out = mode4_select(0, 0.0, _sensing(avg, cfg=cfg), np.random.default_rng(k), cfg)
        assert out.n_candidates == 1
        assert out.decision.resource == from_flat(150, cfg)


def test_mode4_floor_holds_on_random_fields():
    rng = np.random.default_rng(1)
    for _ in range(50):
        avg = rng.uniform(-130.0, -60.0, size=300)
        avg[rng.random(300) < 0.2] = np.nan  # unmeasured holes
        own = int(rng.integers(0, 100))
        if np.isnan(avg).all():
            continue
        out = mode4_select(0, 0.0, _sensing(avg, own), rng, CFG)
        assert out.n_candidates >= candidate_floor(out.n_selectable, CFG)


def test_mode4_never_selects_own_subframe():
    avg = np.full(300, -70.0)
    avg[21:24] = -150.0  # own subframe 7 is the quietest by far
    for k in range(50):
        out = mode4_select(0, 0.0, _sensing(avg, own_sf=7), np.random.default_rng(k), CFG)
        assert out.decision.resource.subframe != 7


def test_mode4_never_selects_unmeasured():
    avg = np.full(300, -70.0)
    avg[30:33] = np.nan
    for k in range(50):
        out = mode4_select(0, 0.0, _sensing(avg, own_sf=0), np.random.default_rng(k), CFG)
        assert out.n_selectable == 294
        assert out.decision.resource.subframe != 10


def test_mode4_empty_window_raises():
    with pytest.raises(ValueError, match="empty sensing window"):
        mode4_select(3, 0.0, _sensing(np.full(300, np.nan)), np.random.default_rng(0), CFG)


def test_mode4_expiry_bounds():
    avg = np.full(300, -80.0)
    for k in range(30):
        out = mode4_select(0, 5000.0, _sensing(avg), np.random.default_rng(k), CFG)
        assert 5500.0 <= out.decision.sps_expiry_ms <= 6500.0


def test_mode4_is_pure_in_sensing_and_rng():
    # identical sensing + rng state must yield identical decisions, whatever the id
    avg = np.random.default_rng(2).uniform(-120.0, -70.0, size=300)
    a = mode4_select(3, 100.0, _sensing(avg), np.random.default_rng(9), CFG)
    b = mode4_select(451, 100.0, _sensing(avg), np.random.default_rng(9), CFG)
    assert a.decision.resource == b.decision.resource
    assert a.decision.sps_expiry_ms == b.decision.sps_expiry_ms


# ---- mode-3 minimum received power ----

GRID2 = SimConfig(num_subframes=2, num_subbands=1)
GRID3 = SimConfig(num_subframes=3, num_subbands=1)


def test_minpower_crossing_beats_greedy():
    # [[1,2],[2,4]]: vehicle 0 keeps its cheap pick only if the total allows it
    reports = np.array([[1.0, 2.0], [2.0, 4.0]])
    decisions = mode3_min_power([0, 1], 0.0, reports, np.random.default_rng(0), GRID2)
    assert decisions[0].vehicle_id == 0
    assert decisions[0].resource == from_flat(1, GRID2)
    assert decisions[1].resource == from_flat(0, GRID2)


def test_minpower_picks_noise_floor_channel():
    reports = np.full((1, 300), dbm_to_mw(-60.0))
    reports[0, 137] = dbm_to_mw(-97.67)
    decisions = mode3_min_power([5], 0.0, reports, np.random.default_rng(0), CFG)
    assert decisions[0].resource == from_flat(137, CFG)


def test_minpower_within_batch_injective():
    # both rows would pick column 0 alone; the matching must split them
    reports = np.array([[0.0, 5.0, 9.0], [0.0, 7.0, 9.0]])
    decisions = mode3_min_power([0, 1], 0.0, reports, np.random.default_rng(0), GRID3)
    cols = [d.resource.subframe for d in decisions]
    assert sorted(cols) == [0, 1]
    assert cols == [1, 0]  # 5 + 0 beats 0 + 7


def test_minpower_median_fill_is_neutral():
    # NaN fills with the row median 7.5, so the measured 6.0 still wins
    reports = np.array([[np.nan, 6.0, 9.0]])
    decisions = mode3_min_power([2], 0.0, reports, np.random.default_rng(0), GRID3)
    assert decisions[0].resource == from_flat(1, GRID3)


def test_minpower_oversized_batch_chunks():
    reports = np.tile(np.array([[1.0, 2.0, 3.0]]), (5, 1))
    decisions = mode3_min_power([0, 1, 2, 3, 4], 0.0, reports,
                                np.random.default_rng(0), GRID3)
    assert [d.vehicle_id for d in decisions] == [0, 1, 2, 3, 4]
    first = {d.resource for d in decisions[:3]}
    second = {d.resource for d in decisions[3:]}
    assert len(first) == 3 and len(second) == 2


def test_minpower_expiry_bounds_and_empty_batch():
    assert mode3_min_power([], 0.0, np.zeros((0, 2)), np.random.default_rng(0), GRID2) == []
    reports = np.array([[1.0, 2.0]])
    for k in range(20):
        d = mode3_min_power([0], 300.0, reports, np.random.default_rng(k), GRID2)[0]
        assert 800.0 <= d.sps_expiry_ms <= 1800.0


# ---- mode-3 maximum reuse distance ----

def _line_fleet(positions):
    n = len(positions)
    return Fleet(pos_m=np.asarray(positions, dtype=float),
                 lane=np.zeros(n, dtype=np.int64),
                 direction=np.ones(n, dtype=np.int64),
                 speed_mps=np.full(n, 27.78))


def test_maxreuse_weight_is_nearest_holder():
    # s0 held at 120 m and 300 m (weight 120), s1 held at 10 m (weight 10)
    fleet = _line_fleet([0.0, 120.0, 300.0, 10.0])
    alloc = np.array([1, 0, 0, 1])
    d = mode3_max_reuse([0], 0.0, fleet, alloc, np.random.default_rng(0), GRID2)
    assert d[0].resource == from_flat(0, GRID2)


def test_maxreuse_prefers_free_subchannel():
    # s0's nearest holder is 2400 m away but s1 is unheld (road-length weight)
    fleet = _line_fleet([0.0, 2400.0, 2600.0])
    alloc = np.array([0, 0, 0])
    d = mode3_max_reuse([0], 0.0, fleet, alloc, np.random.default_rng(0), GRID2)
    assert d[0].resource == from_flat(1, GRID2)


def test_maxreuse_ignores_batch_holdings():
    # the only holders are the requesters themselves; both subchannels are free
    fleet = _line_fleet([0.0, 50.0])
    alloc = np.array([0, 1])
    d = mode3_max_reuse([0, 1], 0.0, fleet, alloc, np.random.default_rng(0), GRID2)
    assert {dd.resource for dd in d} == {from_flat(0, GRID2), from_flat(1, GRID2)}


def test_maxreuse_wrap_distance():
    # holder at 4990 on a 5000 m loop is only 10 m from a requester at 0
    fleet = _line_fleet([0.0, 4990.0, 2500.0])
    alloc = np.array([1, 0, 1])
    d = mode3_max_reuse([0], 0.0, fleet, alloc, np.random.default_rng(0), GRID2)
    # s0 holder 10 m away, s1 holder 2500 m away
    assert d[0].resource == from_flat(1, GRID2)


def test_maxreuse_oversized_batch_chunks():
    fleet = _line_fleet([0.0, 100.0, 200.0])
    alloc = np.array([0, 1, 0])
    d = mode3_max_reuse([0, 1, 2], 0.0, fleet, alloc, np.random.default_rng(0), GRID2)
    assert len(d) == 3
    assert len({dd.resource for dd in d[:2]}) == 2


def test_maxreuse_expiry_bounds():
    fleet = _line_fleet([0.0, 100.0])
    alloc = np.array([0, 1])
    for k in range(20):
        d = mode3_max_reuse([0], 50.0, fleet, alloc, np.random.default_rng(k), GRID2)[0]
        assert 550.0 <= d.sps_expiry_ms <= 1550.0
