"""Run-effort segmentation and sprint detection on player speed signals.

A run effort is one acceleration-to-deceleration episode of a player's
smoothed speed curve. The curve is cut at valleys that are deep enough —
a valley is a valid cut-off when the drop from the previous peak or the
rise to the next peak exceeds ``tau_kmh`` — plus the period boundaries,
which always cut. Each segment between consecutive cut-offs that contains
a speed peak becomes one effort; efforts whose peak exceeds the sprint
threshold are sprints. The threshold therefore never moves effort
boundaries, it only filters them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, Config
from .tracking import TrackingSequence, TrackSegment

MS_TO_KMH = 3.6


@dataclass
class SpeedSignal:
    """Smoothed speed samples (km/h) for one contiguous presence run."""

    player_id: str
    period: int
    times: np.ndarray
    speeds: np.ndarray
    raw_speeds: np.ndarray

    def __post_init__(self) -> None:
        if len(self.times) != len(self.speeds):
            raise ValueError("times and speeds must have equal length")
        if len(self.times) and float(np.min(self.speeds)) < 0:
            raise ValueError("speeds must be non-negative")


@dataclass(frozen=True)
class RunEffort:
    """One accelerate-peak-decelerate episode of a speed signal."""

    player_id: str
    period: int
    start_time: float
    end_time: float
    peak_time: float
    peak_speed: float

    @property
    def duration(self) -> float:
        return self.end_time - self.start_time


@dataclass(frozen=True)
class Sprint:
    """A run effort whose peak speed clears the sprint threshold."""

    effort: RunEffort
    distance: float
    mean_speed: float

    @property
    def player_id(self) -> str:
        return self.effort.player_id

    @property
    def period(self) -> int:
        return self.effort.period

    @property
    def start_time(self) -> float:
        return self.effort.start_time

    @property
    def end_time(self) -> float:
        return self.effort.end_time

    @property
    def peak_time(self) -> float:
        return self.effort.peak_time

    @property
    def peak_speed(self) -> float:
        return self.effort.peak_speed

    @property
    def duration(self) -> float:
        return self.effort.duration


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; the window shrinks near the edges."""
    n = len(values)
    if n == 0 or window <= 1:
        return np.asarray(values, dtype=float)
    half = window // 2
    padded = np.concatenate([[0.0], np.cumsum(values, dtype=float)])
    lo = np.maximum(np.arange(n) - half, 0)
    hi = np.minimum(np.arange(n) + half + 1, n)
    return (padded[hi] - padded[lo]) / (hi - lo)


def _raw_speeds(times: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Finite-difference speed magnitude in km/h, one value per sample."""
    n = len(times)
    if n == 1:
        return np.zeros(1)
    speeds = np.empty(n)
    diffs = np.linalg.norm(np.diff(positions, axis=0), axis=1)
    dts = np.diff(times)
    speeds[0] = diffs[0] / dts[0]
    speeds[-1] = diffs[-1] / dts[-1]
    if n > 2:
        span = times[2:] - times[:-2]
        speeds[1:-1] = np.linalg.norm(positions[2:] - positions[:-2], axis=1) / span
    return speeds * MS_TO_KMH


def compute_speed(
    seq: TrackingSequence,
    player: str,
    smoothing_window_s: float = DEFAULT_CONFIG.smoothing_window_s,
) -> list[SpeedSignal]:
    """Per-run smoothed speed signals for ``player``.

    Absent frames split the track, so one signal is returned per contiguous
    presence run per period. Smoothing is a centered moving average spanning
    ``smoothing_window_s`` seconds.
    """
    window = max(1, round(smoothing_window_s * seq.sample_rate))
    if window % 2 == 0:
        window += 1
    signals = []
    for segment in seq.player_track(player):
        raw = _raw_speeds(segment.times, segment.positions)
        signals.append(
            SpeedSignal(
                player_id=player,
                period=segment.period,
                times=segment.times,
                speeds=moving_average(raw, window),
                raw_speeds=raw,
            )
        )
    return signals


def _compress_plateaus(speeds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse runs of equal consecutive values to their midpoint sample.

    Returns (values, original_indices) for the compressed series.
    """
    values = []
    indices = []
    i = 0
    n = len(speeds)
    while i < n:
        j = i
        while j + 1 < n and speeds[j + 1] == speeds[i]:
            j += 1
        values.append(speeds[i])
        indices.append((i + j) // 2)
        i = j + 1
    return np.asarray(values), np.asarray(indices, dtype=int)


def _extrema(values: np.ndarray) -> list[tuple[int, str]]:
    """Alternating (index, 'peak'|'valley') extrema of a plateau-free series.

    Series endpoints count: a boundary sample higher than its neighbor is a
    peak, lower is a valley. A constant series has no extrema.
    """
    m = len(values)
    if m < 2:
        return []
    out: list[tuple[int, str]] = []
    out.append((0, "valley" if values[1] > values[0] else "peak"))
    for k in range(1, m - 1):
        if values[k] > values[k - 1] and values[k] > values[k + 1]:
            out.append((k, "peak"))
        elif values[k] < values[k - 1] and values[k] < values[k + 1]:
            out.append((k, "valley"))
    out.append((m - 1, "valley" if values[m - 2] > values[m - 1] else "peak"))
    return out


def detect_run_efforts(
    signal: SpeedSignal,
    tau_kmh: float = DEFAULT_CONFIG.tau_kmh,
    min_duration_s: float = DEFAULT_CONFIG.min_effort_duration_s,
) -> list[RunEffort]:
    """Segment a speed signal into run efforts.

    A valley is a valid cut-off iff the drop from the previous peak or the
    rise to the next peak exceeds ``tau_kmh``; the signal boundaries always
    cut. Segments without a peak, and efforts shorter than
    ``min_duration_s``, are dropped.
    """
    speeds = np.asarray(signal.speeds, dtype=float)
    if len(speeds) == 0:
        raise ValueError("signal is empty")
    values, orig_idx = _compress_plateaus(speeds)
    extrema = _extrema(values)
    if not extrema:
        return []

    peaks = [k for k, (_, kind) in enumerate(extrema) if kind == "peak"]
    cutoffs: set[int] = {0, len(speeds) - 1}
    for e, (k, kind) in enumerate(extrema):
        if kind != "valley":
            continue
        valley = values[k]
        prev_peak = values[extrema[e - 1][0]] if e > 0 else None
        next_peak = values[extrema[e + 1][0]] if e < len(extrema) - 1 else None
        deep_before = prev_peak is not None and prev_peak - valley > tau_kmh
        deep_after = next_peak is not None and next_peak - valley > tau_kmh
        if deep_before or deep_after:
            cutoffs.add(int(orig_idx[k]))

    peak_orig = {int(orig_idx[extrema[k][0]]) for k in peaks}
    bounds = sorted(cutoffs)
    efforts = []
    for lo, hi in zip(bounds, bounds[1:]):
        if not any(lo <= p <= hi for p in peak_orig):
            continue
        window = speeds[lo : hi + 1]
        peak_at = lo + int(np.argmax(window))
        effort = RunEffort(
            player_id=signal.player_id,
            period=signal.period,
            start_time=float(signal.times[lo]),
            end_time=float(signal.times[hi]),
            peak_time=float(signal.times[peak_at]),
            peak_speed=float(speeds[peak_at]),
        )
        if effort.duration >= min_duration_s:
            efforts.append(effort)
    return efforts


def detect_sprints(
    efforts: list[RunEffort],
    seq: TrackingSequence,
    threshold_kmh: float = DEFAULT_CONFIG.sprint_threshold_kmh,
) -> list[Sprint]:
    """Keep efforts with peak speed strictly above the threshold.

    Path distance and mean speed over the effort interval are attached from
    the raw positions in ``seq``.
    """
    sprints = []
    for effort in efforts:
        if not effort.peak_speed > threshold_kmh:
            continue
        distance = _path_distance(seq, effort)
        mean_speed = distance / effort.duration * MS_TO_KMH if effort.duration > 0 else 0.0
        sprints.append(Sprint(effort=effort, distance=distance, mean_speed=mean_speed))
    return sprints


def _path_distance(seq: TrackingSequence, effort: RunEffort) -> float:
    for segment in seq.player_track(effort.player_id):
        if segment.period != effort.period:
            continue
        mask = (segment.times >= effort.start_time - 1e-9) & (
            segment.times <= effort.end_time + 1e-9
        )
        if mask.sum() >= 2:
            pts = segment.positions[mask]
            return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
    return 0.0


def detect_player_sprints(
    seq: TrackingSequence, player: str, config: Config = DEFAULT_CONFIG
) -> list[Sprint]:
    """Full detection pipeline for one player."""
    sprints: list[Sprint] = []
    for signal in compute_speed(seq, player, config.smoothing_window_s):
        efforts = detect_run_efforts(signal, config.tau_kmh, config.min_effort_duration_s)
        sprints.extend(detect_sprints(efforts, seq, config.sprint_threshold_kmh))
    return sprints


def detect_all_sprints(seq: TrackingSequence, config: Config = DEFAULT_CONFIG) -> list[Sprint]:
    """Detect sprints for every rostered player, ordered by time."""
    sprints = []
    for roster in seq.rosters:
        for player in roster.players:
            if any(seq.player_track(player)):
                sprints.extend(detect_player_sprints(seq, player, config))
    sprints.sort(key=lambda s: (s.period, s.start_time, s.player_id))
    return sprints


def sprint_rows(seq: TrackingSequence, sprints: list[Sprint]) -> list[dict]:
    """Flat export rows for a sprint list."""
    return [
        {
            "team": seq.team_of(s.player_id),
            "player": s.player_id,
            "period": s.period,
            "start_s": round(s.start_time, 3),
            "end_s": round(s.end_time, 3),
            "peak_time_s": round(s.peak_time, 3),
            "peak_speed_kmh": round(s.peak_speed, 2),
            "distance_m": round(s.distance, 2),
            "mean_speed_kmh": round(s.mean_speed, 2),
        }
        for s in sprints
    ]
