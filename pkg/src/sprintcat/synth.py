"""Scripted match scenarios with known sprint labels.

Each archetype stages a 12-second fragment (10 Hz, full 22-player cast)
containing exactly one sprint whose tactical category is known by
construction: the run satisfies the intended category's conditions with
comfortable margins while every higher-priority category is structurally
ruled out. Per-scenario parameter jitter stays strictly inside those
margins, so detection plus classification must recover the intended
label for every non-boundary scenario - that recovery is the generator's
contract and the rule engine's accuracy harness.

Boundary variants (``Scenario(boundary=True)``) instead place one
governing quantity exactly on its threshold, which the strict
comparisons must reject; they exist to probe strictness and are never
part of a generated corpus. Only archetypes whose threshold can be hit
exactly in coordinates expose one.

``generate_corpus`` materialises ``n`` scenarios per category (index 0
is the canonical, jitter-free archetype) and can write them to disk in
the standard tracking-table layout plus roles, ground-truth labels and
packed feature tensors. Generation is fully deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

import csv
import numpy as np

from .roles import RoleInterval, RoleTimeline, save_roles
from .rules import CATEGORIES
from .tracking import Event, Frame, Pitch, Roster, TrackingSequence, save_tracking

RATE = 10.0
DURATION_S = 12.0
N_FRAMES = int(DURATION_S * RATE) + 1
MAX_PEAK_KMH = 40.0

#: Pseudo-category accepted by :func:`generate`: everybody jogs below the
#: sprint threshold, so the expected sprint list is empty.
NOISE = "noise"

# 4-4-2 anchors; away is the point reflection of home with the same role
# codes, so both teams read identically relative to their attack direction.
_HOME_BASE: dict[str, tuple[str, tuple[float, float]]] = {
    "H01": ("GK", (-50.0, 0.0)),
    "H02": ("LB", (-30.0, 16.0)),
    "H03": ("LCB", (-32.0, 6.0)),
    "H04": ("RCB", (-32.0, -6.0)),
    "H05": ("RB", (-30.0, -16.0)),
    "H06": ("LM", (-15.0, 18.0)),
    "H07": ("LCM", (-16.0, 6.0)),
    "H08": ("RCM", (-16.0, -6.0)),
    "H09": ("RM", (-15.0, -18.0)),
    "H10": ("LCF", (-5.0, 5.0)),
    "H11": ("RCF", (-5.0, -5.0)),
}
_AWAY_BASE: dict[str, tuple[str, tuple[float, float]]] = {
    pid.replace("H", "A", 1): (role, (-x, -y))
    for pid, (role, (x, y)) in _HOME_BASE.items()
}
_BASE = {**_HOME_BASE, **_AWAY_BASE}


@dataclass(frozen=True)
class Scenario:
    """One scripted fragment to generate.

    ``index`` 0 is the canonical archetype (no jitter); higher indices
    draw jittered parameters from a stream seeded by ``(seed, category,
    index)``. ``parameters`` overrides named draws (e.g. ``start_s``,
    ``duration_s``, ``peak_speed_ms``); unknown names are rejected.
    """

    intended_category: str
    seed: int = 0
    index: int = 0
    parameters: Mapping[str, float] | None = None
    boundary: bool = False

    @property
    def scenario_id(self) -> str:
        return f"{self.intended_category}-{self.index:03d}"


@dataclass(frozen=True)
class ExpectedSprint:
    """Ground-truth label: who sprints when, and the intended category."""

    player: str
    period: int
    start_time: float
    end_time: float
    category: str


@dataclass(frozen=True)
class GeneratedScenario:
    scenario: Scenario
    sequence: TrackingSequence
    roles: RoleTimeline
    expected: tuple[ExpectedSprint, ...]


class _Draw:
    """Named uniform draws that collapse to canonical values.

    Every call consumes the stream (keeps indices reproducible whether or
    not a value ends up used), returns the canonical value for canonical
    scenarios, and lets ``Scenario.parameters`` pin any named draw.
    """

    def __init__(self, rng: np.random.Generator, canonical: bool, overrides: Mapping[str, float]):
        self.rng = rng
        self.canonical = canonical
        self._overrides = dict(overrides)
        self._seen: set[str] = set()

    def __call__(self, name: str, canonical_value: float, lo: float, hi: float) -> float:
        self._seen.add(name)
        drawn = float(self.rng.uniform(lo, hi))
        if name in self._overrides:
            return float(self._overrides[name])
        return float(canonical_value) if self.canonical else drawn

    def check_overrides_used(self) -> None:
        unknown = set(self._overrides) - self._seen
        if unknown:
            raise ValueError(f"unknown scenario parameters: {sorted(unknown)}")


def _times() -> np.ndarray:
    return np.arange(N_FRAMES) / RATE


def _still(point: tuple[float, float]) -> np.ndarray:
    return np.tile(np.asarray(point, dtype=float), (N_FRAMES, 1))


def _unit(direction) -> np.ndarray:
    u = np.asarray(direction, dtype=float)
    return u / np.linalg.norm(u)


def _run_track(anchor, direction, start_s: float, duration_s: float, peak_ms: float) -> np.ndarray:
    """Straight run with a raised-cosine speed profile (smooth 0-peak-0).

    Covered distance is ``peak_ms * duration_s / 2``; the player stands
    at ``anchor`` before the run and holds the end point after it.
    """
    tau = np.clip((_times() - start_s) / duration_s, 0.0, 1.0)
    dist = peak_ms * duration_s / 2.0
    s = dist * (tau - np.sin(2.0 * np.pi * tau) / (2.0 * np.pi))
    return np.asarray(anchor, dtype=float) + s[:, None] * _unit(direction)


def _shift_track(anchor, direction, start_s: float, duration_s: float, distance: float) -> np.ndarray:
    """Constant-speed straight shift of ``distance`` over the window."""
    tau = np.clip((_times() - start_s) / duration_s, 0.0, 1.0)
    return np.asarray(anchor, dtype=float) + (distance * tau)[:, None] * _unit(direction)


def _cruise_track(
    anchor,
    direction,
    cruise_ms: float,
    on_s: float,
    off_s: float,
    ramp_s: float = 1.0,
    burst_ms: float = 0.0,
    burst_start_s: float = 0.0,
    burst_duration_s: float = 0.0,
) -> np.ndarray:
    """Sustained straight carry: ramp up, cruise, optional speed burst."""
    t = _times()

    def ramp(edge: float) -> np.ndarray:
        x = np.clip((t - edge) / ramp_s, 0.0, 1.0)
        return (1.0 - np.cos(np.pi * x)) / 2.0

    v = cruise_ms * (ramp(on_s) - ramp(off_s))
    if burst_ms:
        x = np.clip((t - burst_start_s) / burst_duration_s, 0.0, 1.0)
        v = v + burst_ms * (1.0 - np.cos(2.0 * np.pi * x)) / 2.0
    gain = np.concatenate([[0.0], np.cumsum((v[1:] + v[:-1]) / 2.0)]) / RATE
    return np.asarray(anchor, dtype=float) + gain[:, None] * _unit(direction)


def _const(value) -> list:
    return [value] * N_FRAMES


def _segments(*parts: tuple[float, object]) -> list:
    """Per-frame list from (valid-until-time, value) parts, in order."""
    out: list = []
    t = _times()
    for i in range(N_FRAMES):
        for until, value in parts:
            if t[i] < until:
                out.append(value)
                break
        else:
            out.append(parts[-1][1])
    return out


@dataclass
class _Script:
    sprinter: str
    start_s: float
    duration_s: float
    tracks: dict[str, np.ndarray]
    ball: np.ndarray
    possession: list
    possessor: list
    events: tuple[Event, ...] = ()


def _core(d: _Draw) -> tuple[float, float, float]:
    t0 = d("start_s", 4.0, 3.2, 4.8)
    dur = d("duration_s", 3.0, 2.6, 3.4)
    peak = d("peak_speed_ms", 7.5, 6.9, 8.4)
    return t0, dur, peak


def _no_boundary(category: str) -> ValueError:
    return ValueError(f"{category} has no boundary variant")


# --- attacking archetypes -------------------------------------------------


def _build_rwb(d: _Draw, boundary: bool) -> _Script:
    if boundary:
        raise _no_boundary("RWB")
    t0, dur, peak = _core(d)
    y = d("anchor_y", 5.0, 3.0, 7.0)
    run = _run_track((-5.0, y), (1.0, 0.0), t0, dur, peak)
    ball = run + np.array([0.3, 0.0])
    return _Script("H10", t0, dur, {"H10": run}, ball, _const("home"), _const("H10"))


def _build_exs(d: _Draw, boundary: bool) -> _Script:
    t0, dur, peak = _core(d)
    if boundary:
        # Ends exactly 3 m past a ball it started behind: both "ahead"
        # clauses sit on their thresholds and must fail strictly.
        ball_at = (-10.0, -14.0)
        dist = 6.0
        dur = 2.0 * dist / 7.5
        run = _run_track((-13.0, -14.0), (1.0, 0.0), t0, dur, 7.5)
        return _Script("H09", t0, dur, {"H09": run}, _still(ball_at), _const("home"), _const(None))
    y = d("anchor_y", -14.0, -16.0, -12.0)
    x = d("anchor_x", -2.0, -3.0, -1.0)
    run = _run_track((x, y), (1.0, 0.0), t0, dur, peak)
    holder = _still((-16.0, 6.0))
    return _Script(
        "H09", t0, dur, {"H09": run, "H07": holder}, holder.copy(), _const("home"), _const("H07")
    )


def _build_pen(d: _Draw, boundary: bool) -> _Script:
    t0, dur, peak = _core(d)
    if boundary:
        # Ends exactly on the opposing back line (x = 32): not beyond it.
        dist = 7.0
        dur = 2.0 * dist / 7.5
        run = _run_track((25.0, 3.0), (1.0, 0.0), t0, dur, 7.5)
    else:
        x = d("anchor_x", 26.0, 25.5, 26.5)
        y = d("anchor_y", 3.0, 1.0, 5.0)
        run = _run_track((x, y), (1.0, 0.0), t0, dur, peak)
    holder = _still((-16.0, -6.0))
    return _Script(
        "H10", t0, dur, {"H10": run, "H08": holder}, holder.copy(), _const("home"), _const("H08")
    )


def _build_bib(d: _Draw, boundary: bool) -> _Script:
    t0, dur, peak = _core(d)
    y = d("anchor_y", -2.0, -3.0, -1.0)
    # Wide teammate holds the ball; run arrives in the box expecting a cross.
    holder_at = (38.0, -20.16) if boundary else (38.0, -24.0)
    if boundary:
        y = -2.0
    run = _run_track((29.5, y), (1.0, 0.0), t0, dur, peak)
    holder = _still(holder_at)
    return _Script(
        "H11", t0, dur, {"H11": run, "H09": holder}, holder.copy(), _const("home"), _const("H09")
    )


def _build_sup(d: _Draw, boundary: bool) -> _Script:
    t0, dur, peak = _core(d)
    if boundary:
        start = (8.0, -6.0)  # exactly level with the ball, not behind it
    else:
        start = (d("anchor_x", -10.0, -11.0, -9.0), d("anchor_y", -6.0, -7.0, -5.0))
    run = _run_track(start, (1.0, 0.0), t0, dur, peak)
    holder = _still((8.0, 5.0))
    return _Script(
        "H08", t0, dur, {"H08": run, "H10": holder}, holder.copy(), _const("home"), _const("H10")
    )


def _build_ovl(d: _Draw, boundary: bool) -> _Script:
    t0, dur, peak = _core(d)
    if boundary:
        # Lands exactly on the wide-channel edge |y| = 20.16.
        dist = 4.16 * np.sqrt(2.0)
        dur = 2.0 * dist / 7.5
        run = _run_track((2.0, -16.0), (1.0, -1.0), t0, dur, 7.5)
    else:
        x = d("anchor_x", 2.0, 1.0, 3.0)
        y = d("anchor_y", -16.0, -16.5, -15.5)
        run = _run_track((x, y), (1.0, -1.0), t0, dur, peak)
    holder = _still((4.0, -10.0))
    return _Script(
        "H09", t0, dur, {"H09": run, "H11": holder}, holder.copy(), _const("home"), _const("H11")
    )


def _build_unl(d: _Draw, boundary: bool) -> _Script:
    t0, dur, peak = _core(d)
    if boundary:
        # Ball holder sits exactly level with the run's end: not outside it.
        dist = 10.0 * np.sqrt(2.0)
        dur = 2.0 * dist / 8.0
        run = _run_track((2.0, 14.0), (1.0, 1.0), t0, dur, 8.0)
        holder = _still((14.0, 24.0))
    else:
        x = d("anchor_x", 2.0, 1.0, 3.0)
        y = d("anchor_y", 16.0, 15.5, 16.5)
        run = _run_track((x, y), (1.0, 1.0), t0, dur, peak)
        holder = _still((4.0, 28.5))
    return _Script(
        "H08", t0, dur, {"H08": run, "H06": holder}, holder.copy(), _const("home"), _const("H06")
    )


def _build_mtr(d: _Draw, boundary: bool) -> _Script:
    if boundary:
        raise _no_boundary("MTR")
    t0, dur, peak = _core(d)
    x = d("anchor_x", -2.0, -3.0, -1.0)
    y = d("anchor_y", 5.0, 4.0, 6.0)
    run = _run_track((x, y), (-1.0, 0.0), t0, dur, peak)
    holder = _still((-32.0, 6.0))
    return _Script(
        "H10", t0, dur, {"H10": run, "H03": holder}, holder.copy(), _const("home"), _const("H03")
    )


# --- defending archetypes -------------------------------------------------


def _build_prs(d: _Draw, boundary: bool) -> _Script:
    t0, dur, peak = _core(d)
    target = _still((16.0, 14.0))
    if boundary:
        # Ends exactly 5 m from the pressed carrier; no lane within 3 m.
        dist = 8.0
        dur = 2.0 * dist / 7.5
        run = _run_track((3.0, 14.0), (1.0, 0.0), t0, dur, 7.5)
    else:
        x = d("anchor_x", 4.0, 3.5, 4.5)
        y = d("anchor_y", 14.0, 13.5, 14.5)
        run = _run_track((x, y), (1.0, 0.0), t0, dur, peak)
    return _Script(
        "H10", t0, dur, {"H10": run, "A08": target}, target.copy(), _const("away"), _const("A08")
    )


def _build_cov(d: _Draw, boundary: bool) -> _Script:
    if boundary:
        raise _no_boundary("COV")
    t0, dur, peak = _core(d)
    x = d("anchor_x", -6.0, -7.0, -5.0)
    y = d("anchor_y", -8.0, -9.0, -7.0)
    run = _run_track((x, y), (-1.0, 0.0), t0, dur, peak)
    holder = _still((16.0, -6.0))
    tracks = {
        "H08": run,
        "A07": holder,
        # Two teammates drop off with the runner so the team retreats too.
        "H07": _shift_track((-16.0, 6.0), (-1.0, 0.0), t0, dur, 8.0),
        "H10": _shift_track((-5.0, 5.0), (-1.0, 0.0), t0, dur, 8.0),
    }
    return _Script("H08", t0, dur, tracks, holder.copy(), _const("away"), _const("A07"))


def _build_rec(d: _Draw, boundary: bool) -> _Script:
    if boundary:
        raise _no_boundary("REC")
    t0, dur, peak = _core(d)
    x = d("anchor_x", 10.0, 9.5, 10.5)
    y = d("anchor_y", 2.0, 1.5, 2.5)
    run = _run_track((x, y), (-1.0, 0.0), t0, dur, peak)
    carrier = _shift_track((-5.0, -12.0), (-1.0, 0.0), t0, dur, 9.0)
    tracks = {
        "H08": run,
        "A10": carrier,
        "H07": _shift_track((-16.0, 6.0), (-1.0, 0.0), t0, dur, 8.0),
        "H10": _shift_track((-5.0, 5.0), (-1.0, 0.0), t0, dur, 8.0),
        # Commit the counter-attacking side low so every potential passing
        # lane stays well clear of the recovery path.
        "A04": _still((33.0, -4.0)),
        "A05": _still((30.0, -19.5)),
        "A08": _still((16.0, -9.0)),
        "A09": _still((14.0, -14.5)),
        "A11": _still((5.0, -6.0)),
    }
    ball = carrier + np.array([-0.3, 0.0])
    return _Script("H08", t0, dur, tracks, ball, _const("away"), _const("A10"))


def _build_int(d: _Draw, boundary: bool) -> _Script:
    if boundary:
        raise _no_boundary("INT")
    t0 = d("start_s", 4.0, 3.4, 4.6)
    dur = d("duration_s", 3.0, 2.6, 3.2)
    peak = d("peak_speed_ms", 7.5, 6.9, 8.4)
    passer_at, receiver_at = (14.0, 8.0), (-2.0, -12.0)
    kick_s, land_s = 3.0, 9.0
    # Run the perpendicular through the pass midpoint (6, -2).
    u = _unit((20.0, -16.0))
    start = np.array([6.0, -2.0]) - 5.5 * u
    run = _run_track(start, u, t0, dur, peak)
    t = _times()
    flight = np.clip((t - kick_s) / (land_s - kick_s), 0.0, 1.0)
    ball = np.asarray(passer_at) + flight[:, None] * (
        np.asarray(receiver_at) - np.asarray(passer_at)
    )
    events = (
        Event(
            period=1,
            time=kick_s,
            end_time=land_s,
            kind="pass",
            team="away",
            actor="A08",
            target="A06",
            start=passer_at,
            end=receiver_at,
        ),
    )
    tracks = {"H08": run, "A08": _still(passer_at), "A06": _still(receiver_at)}
    possessor = _segments((kick_s, "A08"), (land_s, None), (DURATION_S + 1, "A06"))
    return _Script("H08", t0, dur, tracks, ball, _const("away"), possessor, events)


def _build_cto(d: _Draw, boundary: bool) -> _Script:
    if boundary:
        raise _no_boundary("CTO")
    cruise = d("cruise_speed_ms", 5.1, 5.0, 5.2)
    burst = d("peak_speed_ms", 3.2, 3.05, 3.45)
    t0 = d("start_s", 4.5, 4.0, 5.0)
    dur = d("duration_s", 3.0, 3.0, 3.0)
    on_s = 0.5
    carrier = _cruise_track((14.0, 0.0), (-1.0, 0.0), cruise, on_s, DURATION_S + 2.0)
    chaser = _cruise_track(
        (19.0, 1.5),
        (-1.0, 0.0),
        cruise,
        on_s,
        DURATION_S + 2.0,
        burst_ms=burst,
        burst_start_s=t0,
        burst_duration_s=dur,
    )
    ball = carrier + np.array([-0.3, 0.0])
    return _Script(
        "H10", t0, dur, {"H10": chaser, "A10": carrier}, ball, _const("away"), _const("A10")
    )


def _build_pup(d: _Draw, boundary: bool) -> _Script:
    t0 = d("start_s", 4.0, 3.2, 4.8)
    dur = d("duration_s", 3.4, 3.2, 3.6)
    peak = d("peak_speed_ms", 7.6, 7.4, 8.5)
    step = 10.0 if boundary else 12.5
    if boundary:
        # The line advances exactly 10 m - not more than 10.
        dur, peak = 3.4, 2.0 * 12.0 / 3.4
    tracks = {
        "H04": _run_track((-32.0, -6.0), (1.0, 0.0), t0, dur, peak),
        "H02": _shift_track((-30.0, 16.0), (1.0, 0.0), t0, dur, step),
        "H03": _shift_track((-32.0, 6.0), (1.0, 0.0), t0, dur, step),
        "H05": _shift_track((-30.0, -16.0), (1.0, 0.0), t0, dur, step),
    }
    possession = ["home" if i % 2 == 0 else "away" for i in range(N_FRAMES)]
    return _Script("H04", t0, dur, tracks, _still((15.0, 8.0)), possession, _const(None))


def _build_oth(d: _Draw, boundary: bool) -> _Script:
    if boundary:
        raise _no_boundary("OTH")
    t0 = d("start_s", 4.0, 3.2, 4.8)
    dur = d("duration_s", 3.0, 2.6, 3.0)
    peak = d("peak_speed_ms", 7.0, 6.9, 7.6)
    # Straight toward the touchline: no net forward/backward component,
    # ends outside every zone a category row cares about.
    run = _run_track((-16.0, 6.0), (0.0, 1.0), t0, dur, peak)
    holder = _still((-32.0, 6.0))
    return _Script(
        "H07", t0, dur, {"H07": run, "H03": holder}, holder.copy(), _const("home"), _const("H03")
    )


def _build_noise(d: _Draw, boundary: bool) -> _Script:
    if boundary:
        raise _no_boundary(NOISE)
    t = _times()
    tracks = {}
    for k, (pid, (_, base)) in enumerate(sorted(_BASE.items())):
        phase = 2.0 * np.pi * k / len(_BASE)
        axis = np.array([1.0, 0.0]) if k % 2 == 0 else np.array([0.0, 1.0])
        sway = 2.0 * np.sin(2.0 * np.pi * 0.2 * t + phase)
        tracks[pid] = np.asarray(base, dtype=float) + sway[:, None] * axis
    return _Script("", 0.0, 0.0, tracks, _still((0.0, 0.0)), _const(None), _const(None))


_BUILDERS: dict[str, Callable[[_Draw, bool], _Script]] = {
    "RWB": _build_rwb,
    "EXS": _build_exs,
    "PEN": _build_pen,
    "BIB": _build_bib,
    "SUP": _build_sup,
    "OVL": _build_ovl,
    "UNL": _build_unl,
    "MTR": _build_mtr,
    "PRS": _build_prs,
    "COV": _build_cov,
    "REC": _build_rec,
    "INT": _build_int,
    "CTO": _build_cto,
    "PUP": _build_pup,
    "OTH": _build_oth,
    NOISE: _build_noise,
}

#: Archetypes exposing an exactly-on-threshold variant.
BOUNDARY_CATEGORIES = ("EXS", "PEN", "BIB", "SUP", "OVL", "UNL", "PRS", "PUP")


def _assemble(script: _Script, d: _Draw) -> tuple[TrackingSequence, RoleTimeline]:
    tracks: dict[str, np.ndarray] = {}
    for pid, (_, base) in sorted(_BASE.items()):
        if pid in script.tracks:
            track = np.asarray(script.tracks[pid], dtype=float)
        else:
            jx = d(f"drift_{pid}_x", 0.0, -1.0, 1.0)
            jy = d(f"drift_{pid}_y", 0.0, -1.0, 1.0)
            track = _still((base[0] + jx, base[1] + jy))
        tracks[pid] = np.round(track, 2)
    unknown = set(script.tracks) - set(tracks)
    if unknown:
        raise ValueError(f"scripted tracks for unknown players: {sorted(unknown)}")

    for pid, track in tracks.items():
        top_ms = float(np.linalg.norm(np.diff(track, axis=0), axis=1).max()) * RATE
        if top_ms * 3.6 > MAX_PEAK_KMH + 1e-6:
            raise ValueError(
                f"{pid} reaches {top_ms * 3.6:.1f} km/h; physical cap is {MAX_PEAK_KMH:.0f} km/h"
            )

    ball = np.round(np.asarray(script.ball, dtype=float), 2)
    times = _times()
    frames = [
        Frame(
            period=1,
            time=round(float(times[i]), 3),
            players={pid: tracks[pid][i].copy() for pid in tracks},
            ball=ball[i].copy(),
            possession_team=script.possession[i],
            possessor=script.possessor[i],
        )
        for i in range(N_FRAMES)
    ]
    rosters = (
        Roster("home", tuple(sorted(_HOME_BASE)), goalkeeper="H01"),
        Roster("away", tuple(sorted(_AWAY_BASE)), goalkeeper="A01"),
    )
    seq = TrackingSequence(
        pitch=Pitch(),
        frames=frames,
        sample_rate=RATE,
        rosters=rosters,
        attack_direction={("home", 1): 1, ("away", 1): -1},
        events=script.events,
    )
    intervals = [
        RoleInterval(
            team="home" if pid in _HOME_BASE else "away",
            player=pid,
            period=1,
            start=0.0,
            end=DURATION_S,
            role=role,
        )
        for pid, (role, _) in sorted(_BASE.items())
    ]
    return seq, RoleTimeline(intervals)


def generate(scenario: Scenario) -> tuple[TrackingSequence, RoleTimeline, list[ExpectedSprint]]:
    """Materialise one scenario.

    Returns the tracking sequence, the scripted role timeline and the
    expected sprint labels. For non-boundary scenarios, running detection
    and classification over the sequence recovers each expected label.
    """
    category = scenario.intended_category
    if category not in _BUILDERS:
        raise ValueError(f"unknown scenario category {category!r}")
    cat_index = list(_BUILDERS).index(category)
    rng = np.random.default_rng([scenario.seed, cat_index, scenario.index])
    canonical = scenario.index == 0 or scenario.boundary
    d = _Draw(rng, canonical, scenario.parameters or {})
    script = _BUILDERS[category](d, scenario.boundary)
    seq, roles = _assemble(script, d)
    d.check_overrides_used()
    expected = []
    if category != NOISE:
        expected.append(
            ExpectedSprint(
                player=script.sprinter,
                period=1,
                start_time=round(script.start_s, 3),
                end_time=round(script.start_s + script.duration_s, 3),
                category=category,
            )
        )
    return seq, roles, expected


def generate_corpus(
    n_per_category: int,
    seed: int = 0,
    out_dir: str | Path | None = None,
) -> list[GeneratedScenario]:
    """Generate ``n_per_category`` scenarios for each of the 15 categories.

    With ``out_dir`` set, writes one tracking-table bundle per scenario
    (plus ``roles.csv`` and ``labels.csv``), a corpus-wide ``labels.csv``
    and ``manifest.csv``, and ``features.bin`` holding one packed feature
    sample per labelled sprint. Same seed, same corpus - byte for byte.
    """
    if n_per_category < 1:
        raise ValueError("n_per_category must be at least 1")
    out = []
    for category in CATEGORIES:
        for index in range(n_per_category):
            scenario = Scenario(category, seed=seed, index=index)
            seq, roles, expected = generate(scenario)
            out.append(GeneratedScenario(scenario, seq, roles, tuple(expected)))
    if out_dir is not None:
        _write_corpus(out, Path(out_dir))
    return out


_LABEL_COLUMNS = ["scenario_id", "team_id", "player_id", "period", "start_s", "end_s", "category"]
_MANIFEST_COLUMNS = ["scenario_id", "category", "seed", "index", "path"]


def _label_row(scenario_id: str, seq: TrackingSequence, exp: ExpectedSprint) -> dict:
    return {
        "scenario_id": scenario_id,
        "team_id": seq.team_of(exp.player),
        "player_id": exp.player,
        "period": exp.period,
        "start_s": f"{exp.start_time:.3f}",
        "end_s": f"{exp.end_time:.3f}",
        "category": exp.category,
    }


def _write_corpus(corpus: list[GeneratedScenario], out_dir: Path) -> None:
    from .features import FeatureSample, sample_from_interval, write_feature_file

    out_dir.mkdir(parents=True, exist_ok=True)
    all_rows: list[dict] = []
    manifest_rows: list[dict] = []
    samples: list[FeatureSample] = []
    for item in corpus:
        sid = item.scenario.scenario_id
        bundle = out_dir / "scenarios" / sid
        save_tracking(item.sequence, bundle)
        save_roles(item.roles, bundle / "roles.csv")
        rows = [_label_row(sid, item.sequence, e) for e in item.expected]
        _write_csv(bundle / "labels.csv", _LABEL_COLUMNS, rows)
        all_rows.extend(rows)
        manifest_rows.append(
            {
                "scenario_id": sid,
                "category": item.scenario.intended_category,
                "seed": item.scenario.seed,
                "index": item.scenario.index,
                "path": f"scenarios/{sid}",
            }
        )
        for e in item.expected:
            samples.append(
                sample_from_interval(
                    item.sequence,
                    player=e.player,
                    period=e.period,
                    start_time=e.start_time,
                    end_time=e.end_time,
                    label=e.category,
                    sample_id=f"{sid}/{e.player}",
                )
            )
    _write_csv(out_dir / "labels.csv", _LABEL_COLUMNS, all_rows)
    _write_csv(out_dir / "manifest.csv", _MANIFEST_COLUMNS, manifest_rows)
    write_feature_file(out_dir / "features.bin", samples)


def _write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
