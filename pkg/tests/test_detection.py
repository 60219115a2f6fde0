"""Speed computation and run-effort segmentation."""

import numpy as np
import pytest

from support import make_sequence, still
from effort_fixtures import EFFORT_FIXTURES
from sprintcat.detection import (
    RunEffort,
    SpeedSignal,
    compute_speed,
    detect_all_sprints,
    detect_run_efforts,
    detect_sprints,
    moving_average,
)


def signal_from(speeds) -> SpeedSignal:
    speeds = np.asarray(speeds, dtype=float)
    times = np.round(np.arange(len(speeds)) * 0.1, 3)
    return SpeedSignal("H02", 1, times, speeds, speeds.copy())


def test_moving_average_shrinks_at_edges():
    got = moving_average(np.array([0.0, 10.0, 20.0, 30.0, 40.0]), 3)
    np.testing.assert_allclose(got, [5.0, 10.0, 20.0, 30.0, 35.0])


def test_moving_average_window_one_is_identity():
    v = np.array([3.0, 1.0, 4.0])
    np.testing.assert_array_equal(moving_average(v, 1), v)


@pytest.mark.parametrize("name,speeds,expected", EFFORT_FIXTURES, ids=[f[0] for f in EFFORT_FIXTURES])
def test_effort_fixture(name, speeds, expected):
    sig = signal_from(speeds)
    efforts = detect_run_efforts(sig)
    got = [(e.start_time, e.end_time, e.peak_time, e.peak_speed) for e in efforts]
    want = [
        (sig.times[s], sig.times[e], sig.times[p], v) for s, e, p, v in expected
    ]
    assert got == want, f"{name}: {got} != {want}"


def test_efforts_tile_without_overlap():
    rng = np.random.default_rng(11)
    for _ in range(50):
        speeds = np.abs(np.cumsum(rng.normal(0, 2.0, rng.integers(8, 80))))
        efforts = detect_run_efforts(signal_from(speeds))
        for a, b in zip(efforts, efforts[1:]):
            assert a.end_time <= b.start_time
        for e in efforts:
            assert e.start_time <= e.peak_time <= e.end_time
            assert e.duration >= 0.5 - 1e-12


def test_raising_tau_never_adds_boundaries():
    rng = np.random.default_rng(12)
    for _ in range(30):
        sig = signal_from(np.abs(np.cumsum(rng.normal(0, 2.0, 60))))
        loose = detect_run_efforts(sig, tau_kmh=2.0, min_duration_s=0.0)
        tight = detect_run_efforts(sig, tau_kmh=6.0, min_duration_s=0.0)
        loose_cuts = {e.start_time for e in loose} | {e.end_time for e in loose}
        tight_cuts = {e.start_time for e in tight} | {e.end_time for e in tight}
        assert tight_cuts <= loose_cuts


def test_uniform_motion_gives_constant_speed():
    n = 30
    xs = 0.5 * np.arange(n)  # 5 m/s = 18 km/h
    pos = np.column_stack([xs - 20.0, np.zeros(n)])
    seq = make_sequence({"H02": pos}, ball=still((0, 0), n))
    (sig,) = compute_speed(seq, "H02")
    np.testing.assert_allclose(sig.speeds, 18.0, rtol=1e-9)
    np.testing.assert_allclose(sig.raw_speeds, 18.0, rtol=1e-9)


def test_speed_matches_analytic_ellipse_within_two_percent():
    # x = a cos(wt), y = b sin(wt): speed = w * sqrt(a^2 sin^2 + b^2 cos^2)
    a, b, w = 10.0, 6.0, 0.4
    n = 151
    t = np.arange(n) / 10.0
    pos = np.column_stack([a * np.cos(w * t), b * np.sin(w * t)])
    seq = make_sequence({"H02": pos}, ball=still((0, 0), n))
    (sig,) = compute_speed(seq, "H02")
    analytic = w * np.sqrt(a**2 * np.sin(w * t) ** 2 + b**2 * np.cos(w * t) ** 2) * 3.6
    inner = slice(10, -10)
    np.testing.assert_allclose(sig.speeds[inner], analytic[inner], rtol=0.02)


def test_absence_splits_signals():
    pos = np.full((20, 2), np.nan)
    pos[:8] = (0.0, 0.0)
    pos[12:] = (5.0, 5.0)
    seq = make_sequence({"H02": pos, "A02": still((1, 1), 20)}, ball=still((0, 0), 20))
    signals = compute_speed(seq, "H02")
    assert [len(s.times) for s in signals] == [8, 8]


def test_sprint_threshold_is_strict():
    n = 21
    pos = np.column_stack([0.6 * np.arange(n) - 6.0, np.zeros(n)])
    seq = make_sequence({"H02": pos}, ball=still((0, 0), n))
    at = RunEffort("H02", 1, 0.0, 2.0, 1.0, 21.0)
    above = RunEffort("H02", 1, 0.0, 2.0, 1.0, 21.01)
    assert detect_sprints([at], seq, threshold_kmh=21.0) == []
    (sprint,) = detect_sprints([above], seq, threshold_kmh=21.0)
    # 0.6 m per frame over 20 steps = 12 m; 12 m / 2 s = 21.6 km/h
    assert sprint.distance == pytest.approx(12.0, abs=1e-9)
    assert sprint.mean_speed == pytest.approx(21.6, abs=1e-9)


def test_threshold_filters_without_moving_boundaries():
    rng = np.random.default_rng(13)
    for _ in range(20):
        sig = signal_from(np.abs(np.cumsum(rng.normal(0, 3.0, 80))))
        efforts = detect_run_efforts(sig)
        pos = np.column_stack([np.linspace(-5, 5, len(sig.times)), np.zeros(len(sig.times))])
        seq = make_sequence({"H02": pos}, ball=still((0, 0), len(sig.times)))
        spans = {(e.start_time, e.end_time) for e in efforts}
        previous = None
        for thr in (19.0, 21.0, 23.0):
            sprints = detect_sprints(efforts, seq, thr)
            got = {(s.start_time, s.end_time) for s in sprints}
            assert got <= spans
            if previous is not None:
                assert got <= previous
            previous = got


def test_detect_all_sprints_is_ordered_and_covers_both_teams():
    n = 41
    burst = np.concatenate([np.zeros(10), np.cumsum(np.full(15, 0.08)), np.full(16, 1.2)])
    h = np.column_stack([-20 + 8 * burst, np.zeros(n)])
    a = np.column_stack([20 - 8 * burst, np.full(n, 5.0)])
    seq = make_sequence({"H02": h, "A02": a}, ball=still((0, 0), n))
    sprints = detect_all_sprints(seq)
    assert {s.player_id for s in sprints} == {"H02", "A02"}
    keys = [(s.period, s.start_time, s.player_id) for s in sprints]
    assert keys == sorted(keys)
