"""Tracking data model: pitch, frames, events, rosters, and file I/O.

Coordinates are meters with the origin at the pitch center. Times are seconds
from the start of each period; every frame carries a ball position and may
carry possession annotations. Two interchange formats are supported:

* ``tracking-table``: a directory holding ``tracking.csv`` (one row per frame
  and entity), ``metadata.json`` (pitch, rosters, attack directions, sample
  rate) and optionally ``events.csv``.
* ``tracking-json``: a single JSON document embedding metadata, frames and
  events.

Positions round-trip at centimeter precision, times at millisecond precision.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

BOUNDS_MARGIN_M = 5.0

EVENT_KINDS = frozenset(
    {"pass", "cross", "reception", "tackle", "clearance", "shot", "pause"}
)


class ParseError(ValueError):
    """Raised when an input file cannot be parsed; message carries the locus."""


class ValidationError(ValueError):
    """Raised when parsed data violates a structural invariant."""


@dataclass(frozen=True)
class Pitch:
    """Pitch dimensions in meters. Defaults describe a 105 x 68 pitch."""

    length: float = 105.0
    width: float = 68.0
    penalty_box_depth: float = 16.5
    penalty_box_half_width: float = 20.16
    goal_half_width: float = 3.66

    def __post_init__(self) -> None:
        if self.length <= 0 or self.width <= 0:
            raise ValidationError("pitch dimensions must be positive")
        if self.penalty_box_depth >= self.length / 2:
            raise ValidationError("penalty box depth must fit in a half")
        if self.penalty_box_half_width >= self.width / 2:
            raise ValidationError("penalty box width must fit on the pitch")
        if self.goal_half_width >= self.penalty_box_half_width:
            raise ValidationError("goal must be narrower than the penalty box")


@dataclass(frozen=True)
class Roster:
    """Players of one team. ``goalkeeper`` names the keeper, if known."""

    team_id: str
    players: tuple[str, ...]
    goalkeeper: str | None = None

    def __post_init__(self) -> None:
        if not self.team_id:
            raise ValidationError("team_id must be non-empty")
        if len(set(self.players)) != len(self.players):
            raise ValidationError(f"duplicate player ids on team {self.team_id}")
        if self.goalkeeper is not None and self.goalkeeper not in self.players:
            raise ValidationError(
                f"goalkeeper {self.goalkeeper} not on roster of {self.team_id}"
            )


@dataclass(frozen=True)
class Event:
    """A ball event. Passes and crosses carry both endpoints and an end time."""

    period: int
    time: float
    kind: str
    end_time: float | None = None
    team: str | None = None
    actor: str | None = None
    target: str | None = None
    start: tuple[float, float] | None = None
    end: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValidationError(f"unknown event kind {self.kind!r}")
        if self.kind in ("pass", "cross"):
            if self.start is None or self.end is None or self.end_time is None:
                raise ValidationError(f"{self.kind} event needs endpoints and end_time")
            if self.end_time < self.time:
                raise ValidationError(f"{self.kind} event ends before it starts")


@dataclass
class Frame:
    """One sample: player and ball positions plus possession annotations."""

    period: int
    time: float
    players: dict[str, np.ndarray]
    ball: np.ndarray
    possession_team: str | None = None
    possessor: str | None = None


class TrackingSequence:
    """An immutable, validated match fragment.

    Frames are ordered by (period, time) and uniformly spaced within each
    period at ``sample_rate``. ``attack_direction`` maps (team_id, period)
    to +1 or -1, the sign of the x direction that team attacks toward.
    """

    def __init__(
        self,
        pitch: Pitch,
        frames: list[Frame],
        sample_rate: float,
        rosters: tuple[Roster, Roster],
        attack_direction: dict[tuple[str, int], int],
        events: tuple[Event, ...] = (),
    ) -> None:
        if sample_rate <= 0:
            raise ValidationError("sample_rate must be positive")
        if len(rosters) != 2 or rosters[0].team_id == rosters[1].team_id:
            raise ValidationError("exactly two distinct team rosters required")
        self.pitch = pitch
        self.frames = list(frames)
        self.sample_rate = float(sample_rate)
        self.rosters = rosters
        self.attack_direction = dict(attack_direction)
        self.events = tuple(sorted(events, key=lambda e: (e.period, e.time)))
        self._team_of: dict[str, str] = {}
        overlap = set(rosters[0].players) & set(rosters[1].players)
        if overlap:
            raise ValidationError(f"players on both rosters: {sorted(overlap)}")
        for roster in rosters:
            for pid in roster.players:
                self._team_of[pid] = roster.team_id
        self._validate()
        self._index_frames()
        self._track_cache: dict[str, list[TrackSegment]] = {}

    # -- basic accessors ---------------------------------------------------

    @property
    def teams(self) -> tuple[str, str]:
        return (self.rosters[0].team_id, self.rosters[1].team_id)

    def roster(self, team: str) -> Roster:
        for r in self.rosters:
            if r.team_id == team:
                return r
        raise KeyError(f"unknown team {team!r}")

    def team_of(self, player: str) -> str:
        return self._team_of[player]

    def opponent_of(self, team: str) -> str:
        a, b = self.teams
        if team == a:
            return b
        if team == b:
            return a
        raise KeyError(f"unknown team {team!r}")

    def periods(self) -> list[int]:
        return sorted(self._by_period)

    def frames_in(self, period: int, t0: float, t1: float) -> list[Frame]:
        """Frames of ``period`` with t0 <= time <= t1 (half-sample tolerance)."""
        times, frames = self._by_period[period]
        eps = 0.5 / self.sample_rate
        lo = int(np.searchsorted(times, t0 - eps, side="left"))
        hi = int(np.searchsorted(times, t1 + eps, side="right"))
        return frames[lo:hi]

    def period_span(self, period: int) -> tuple[float, float]:
        times, _ = self._by_period[period]
        return float(times[0]), float(times[-1])

    # -- per-player tracks -------------------------------------------------

    def player_track(self, player: str) -> list["TrackSegment"]:
        """Contiguous presence runs of ``player``, one segment per run."""
        if player not in self._team_of:
            raise KeyError(f"unknown player {player!r}")
        if player not in self._track_cache:
            self._track_cache[player] = self._build_track(player)
        return self._track_cache[player]

    def _build_track(self, player: str) -> list["TrackSegment"]:
        segments: list[TrackSegment] = []
        step = 1.0 / self.sample_rate
        for period in self.periods():
            times, frames = self._by_period[period]
            run_t: list[float] = []
            run_p: list[np.ndarray] = []
            prev_t: float | None = None
            for t, frame in zip(times, frames):
                pos = frame.players.get(player)
                if pos is None:
                    continue
                if prev_t is not None and t - prev_t > 1.5 * step:
                    segments.append(_make_segment(player, period, run_t, run_p))
                    run_t, run_p = [], []
                run_t.append(float(t))
                run_p.append(pos)
                prev_t = t
            if run_t:
                segments.append(_make_segment(player, period, run_t, run_p))
        return segments

    # -- internal ----------------------------------------------------------

    def _index_frames(self) -> None:
        self._by_period: dict[int, tuple[np.ndarray, list[Frame]]] = {}
        for frame in self.frames:
            self._by_period.setdefault(frame.period, (None, []))  # type: ignore[arg-type]
        grouped: dict[int, list[Frame]] = {}
        for frame in self.frames:
            grouped.setdefault(frame.period, []).append(frame)
        self._by_period = {
            p: (np.array([f.time for f in fs]), fs) for p, fs in grouped.items()
        }

    def _validate(self) -> None:
        if not self.frames:
            raise ValidationError("sequence has no frames")
        half_l = self.pitch.length / 2 + BOUNDS_MARGIN_M
        half_w = self.pitch.width / 2 + BOUNDS_MARGIN_M
        step = 1.0 / self.sample_rate
        prev: Frame | None = None
        periods_seen = set()
        for i, frame in enumerate(self.frames):
            if prev is not None:
                if frame.period < prev.period:
                    raise ValidationError(f"frame {i}: period order violated")
                if frame.period == prev.period:
                    delta = frame.time - prev.time
                    if delta <= 0:
                        raise ValidationError(
                            f"frame {i}: non-increasing time {frame.time} in period {frame.period}"
                        )
                    if abs(delta - step) > 2e-3:
                        raise ValidationError(
                            f"frame {i}: spacing {delta:.4f}s differs from 1/sample_rate"
                        )
            periods_seen.add(frame.period)
            if frame.ball is None:
                raise ValidationError(f"frame {i}: ball position required")
            self._check_point(frame.ball, half_l, half_w, i, "ball")
            for pid, pos in frame.players.items():
                if pid not in self._team_of:
                    raise ValidationError(f"frame {i}: player {pid} on no roster")
                self._check_point(pos, half_l, half_w, i, pid)
            if frame.possessor is not None:
                if frame.possessor not in self._team_of:
                    raise ValidationError(f"frame {i}: possessor {frame.possessor} unknown")
                if (
                    frame.possession_team is not None
                    and self._team_of[frame.possessor] != frame.possession_team
                ):
                    raise ValidationError(
                        f"frame {i}: possessor {frame.possessor} not on team "
                        f"{frame.possession_team}"
                    )
            prev = frame
        for team in self.teams:
            for period in periods_seen:
                if (team, period) not in self.attack_direction:
                    raise ValidationError(
                        f"attack direction undefined for ({team}, period {period})"
                    )
        for ev in self.events:
            if ev.team is not None and ev.team not in self.teams:
                raise ValidationError(f"event at {ev.time}: unknown team {ev.team}")

    @staticmethod
    def _check_point(p: np.ndarray, half_l: float, half_w: float, i: int, who: str) -> None:
        x, y = float(p[0]), float(p[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValidationError(f"frame {i}: non-finite position for {who}")
        if abs(x) > half_l or abs(y) > half_w:
            raise ValidationError(
                f"frame {i}: {who} at ({x:.2f}, {y:.2f}) outside pitch bounds"
            )


@dataclass(frozen=True)
class TrackSegment:
    """One contiguous presence run of a player within a period."""

    player_id: str
    period: int
    times: np.ndarray
    positions: np.ndarray  # shape (n, 2)


def _make_segment(player: str, period: int, ts: list[float], ps: list[np.ndarray]) -> TrackSegment:
    return TrackSegment(player, period, np.asarray(ts, dtype=float), np.vstack(ps))


class NormalizedView:
    """Coordinate view in which one team always attacks toward +x.

    Points are reflected through the pitch center whenever the team attacks
    toward -x in a period, so y grows toward that team's left flank. The
    reflection is involutive: applying it twice restores the input.
    """

    def __init__(self, seq: TrackingSequence, team: str) -> None:
        if team not in seq.teams:
            raise KeyError(f"unknown team {team!r}")
        self.seq = seq
        self.team = team

    def sign(self, period: int) -> float:
        return 1.0 if self.seq.attack_direction[(self.team, period)] > 0 else -1.0

    def point(self, p: np.ndarray, period: int) -> np.ndarray:
        return np.asarray(p, dtype=float) * self.sign(period)

    def points(self, ps: np.ndarray, period: int) -> np.ndarray:
        return np.asarray(ps, dtype=float) * self.sign(period)

    def ball(self, frame: Frame) -> np.ndarray:
        return self.point(frame.ball, frame.period)

    def players(self, frame: Frame) -> dict[str, np.ndarray]:
        s = self.sign(frame.period)
        return {pid: pos * s for pid, pos in frame.players.items()}

    def team_players(self, frame: Frame, team: str) -> dict[str, np.ndarray]:
        s = self.sign(frame.period)
        team_of = self.seq.team_of
        return {
            pid: pos * s for pid, pos in frame.players.items() if team_of(pid) == team
        }


def normalize(seq: TrackingSequence, team: str) -> NormalizedView:
    """View of ``seq`` in which ``team`` attacks toward increasing x."""
    return NormalizedView(seq, team)


# -- possession derivation --------------------------------------------------


def derive_possession(
    seq: TrackingSequence,
    control_radius: float = 1.5,
    min_control_frames: int = 3,
) -> TrackingSequence:
    """Fill missing possession annotations from ball proximity.

    A player becomes the possessor when they are the nearest player within
    ``control_radius`` of the ball for at least ``min_control_frames``
    consecutive frames; the whole run is attributed to them. Between
    confirmed runs the previous possession team persists. Frames that
    already carry annotations keep them.
    """
    candidates: list[str | None] = []
    for frame in seq.frames:
        best: str | None = None
        best_d = float("inf")
        for pid in sorted(frame.players):
            d = float(np.hypot(*(frame.players[pid] - frame.ball)))
            if d <= control_radius and d < best_d:
                best = pid
                best_d = d
        candidates.append(best)

    confirmed: list[str | None] = [None] * len(candidates)
    i = 0
    while i < len(candidates):
        j = i
        while (
            j < len(candidates)
            and candidates[j] == candidates[i]
            and seq.frames[j].period == seq.frames[i].period
        ):
            j += 1
        if candidates[i] is not None and j - i >= min_control_frames:
            for k in range(i, j):
                confirmed[k] = candidates[i]
        i = j

    new_frames: list[Frame] = []
    current_team: str | None = None
    current_period: int | None = None
    for frame, owner in zip(seq.frames, confirmed):
        if frame.period != current_period:
            current_team, current_period = None, frame.period
        possession_team = frame.possession_team
        possessor = frame.possessor
        if possession_team is not None:
            current_team = possession_team
        elif owner is not None:
            current_team = seq.team_of(owner)
            possession_team = current_team
        else:
            possession_team = current_team
        if (
            possessor is None
            and owner is not None
            and (possession_team is None or seq.team_of(owner) == possession_team)
        ):
            possessor = owner
        new_frames.append(
            Frame(
                period=frame.period,
                time=frame.time,
                players=frame.players,
                ball=frame.ball,
                possession_team=possession_team,
                possessor=possessor,
            )
        )
    return TrackingSequence(
        seq.pitch, new_frames, seq.sample_rate, seq.rosters, seq.attack_direction, seq.events
    )


# -- file I/O ----------------------------------------------------------------

_TRACKING_COLUMNS = [
    "period",
    "time_s",
    "entity_kind",
    "team_id",
    "player_id",
    "x_m",
    "y_m",
    "possession_team",
    "possessor",
]

_EVENT_COLUMNS = [
    "period",
    "time_s",
    "end_time_s",
    "kind",
    "team_id",
    "actor_id",
    "target_id",
    "x0_m",
    "y0_m",
    "x1_m",
    "y1_m",
]


def load_tracking(path: str | Path, format: str | None = None) -> TrackingSequence:
    """Load a sequence from ``tracking-table`` or ``tracking-json`` storage.

    ``format`` is inferred from the path when omitted: a ``.json`` file is
    read as tracking-json, anything else as a tracking-table bundle. Frames
    with irregular spacing are resampled onto the declared sample-rate grid
    by linear interpolation of positions.
    """
    path = Path(path)
    if format is None:
        format = "tracking-json" if path.suffix == ".json" else "tracking-table"
    if format == "tracking-json":
        return _load_json(path)
    if format == "tracking-table":
        return _load_table(path)
    raise ValueError(f"unknown tracking format {format!r}")


def save_tracking(seq: TrackingSequence, path: str | Path, format: str = "tracking-table") -> Path:
    """Write ``seq`` to disk; returns the path written."""
    path = Path(path)
    if format == "tracking-json":
        path.write_text(json.dumps(_to_json_doc(seq), indent=1))
        return path
    if format == "tracking-table":
        path.mkdir(parents=True, exist_ok=True)
        _write_table(seq, path)
        return path
    raise ValueError(f"unknown tracking format {format!r}")


def _metadata_doc(seq: TrackingSequence) -> dict:
    return {
        "pitch": {
            "length": seq.pitch.length,
            "width": seq.pitch.width,
            "penalty_box_depth": seq.pitch.penalty_box_depth,
            "penalty_box_half_width": seq.pitch.penalty_box_half_width,
            "goal_half_width": seq.pitch.goal_half_width,
        },
        "sample_rate": seq.sample_rate,
        "teams": [
            {
                "team_id": r.team_id,
                "players": list(r.players),
                "goalkeeper": r.goalkeeper,
            }
            for r in seq.rosters
        ],
        "attack_direction": {
            f"{team}:{period}": ("+x" if sign > 0 else "-x")
            for (team, period), sign in sorted(seq.attack_direction.items())
        },
    }


def _parse_metadata(doc: dict, where: str) -> tuple[Pitch, float, tuple[Roster, Roster], dict]:
    try:
        pitch = Pitch(**doc["pitch"]) if "pitch" in doc else Pitch()
        sample_rate = float(doc["sample_rate"])
        rosters = tuple(
            Roster(
                team_id=t["team_id"],
                players=tuple(t["players"]),
                goalkeeper=t.get("goalkeeper"),
            )
            for t in doc["teams"]
        )
        attack = {}
        for key, value in doc["attack_direction"].items():
            team, _, period = key.rpartition(":")
            if value not in ("+x", "-x"):
                raise ParseError(f"{where}: attack direction {value!r} must be +x or -x")
            attack[(team, int(period))] = 1 if value == "+x" else -1
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{where}: malformed metadata ({exc})") from exc
    if len(rosters) != 2:
        raise ParseError(f"{where}: exactly two teams required")
    return pitch, sample_rate, rosters, attack


def _load_table(path: Path) -> TrackingSequence:
    base = path if path.is_dir() else path.parent
    tracking_path = path if path.is_file() else base / "tracking.csv"
    meta_path = base / "metadata.json"
    events_path = base / "events.csv"
    if not tracking_path.exists():
        raise ParseError(f"{tracking_path}: tracking table not found")
    if not meta_path.exists():
        raise ParseError(f"{meta_path}: metadata not found")
    pitch, sample_rate, rosters, attack = _parse_metadata(
        json.loads(meta_path.read_text()), str(meta_path)
    )

    raw_frames: dict[tuple[int, float], Frame] = {}
    with open(tracking_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _TRACKING_COLUMNS:
            raise ParseError(f"{tracking_path}:1: bad or missing header row")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(_TRACKING_COLUMNS):
                raise ParseError(f"{tracking_path}:{lineno}: expected {len(_TRACKING_COLUMNS)} fields")
            try:
                period = int(row[0])
                time = float(row[1])
                kind = row[2]
                pos = np.array([float(row[5]), float(row[6])])
            except ValueError as exc:
                raise ParseError(f"{tracking_path}:{lineno}: {exc}") from exc
            key = (period, time)
            frame = raw_frames.get(key)
            if frame is None:
                frame = Frame(period=period, time=time, players={}, ball=None)  # type: ignore[arg-type]
                raw_frames[key] = frame
            if kind == "ball":
                frame.ball = pos
                frame.possession_team = row[7] or None
                frame.possessor = row[8] or None
            elif kind == "player":
                if not row[4]:
                    raise ParseError(f"{tracking_path}:{lineno}: player row without player_id")
                frame.players[row[4]] = pos
            else:
                raise ParseError(f"{tracking_path}:{lineno}: unknown entity_kind {kind!r}")

    frames = [raw_frames[k] for k in sorted(raw_frames)]
    for frame in frames:
        if frame.ball is None:
            raise ParseError(
                f"{tracking_path}: frame at period {frame.period} t={frame.time} has no ball row"
            )
    frames = _resample_if_needed(frames, sample_rate)

    events: list[Event] = []
    if events_path.exists():
        events = _load_events(events_path)
    return TrackingSequence(pitch, frames, sample_rate, rosters, attack, tuple(events))


def _load_events(path: Path) -> list[Event]:
    events = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _EVENT_COLUMNS:
            raise ParseError(f"{path}:1: bad or missing header row")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                events.append(
                    Event(
                        period=int(row[0]),
                        time=float(row[1]),
                        end_time=float(row[2]) if row[2] else None,
                        kind=row[3],
                        team=row[4] or None,
                        actor=row[5] or None,
                        target=row[6] or None,
                        start=(float(row[7]), float(row[8])) if row[7] else None,
                        end=(float(row[9]), float(row[10])) if row[9] else None,
                    )
                )
            except (ValueError, ValidationError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return events


def _load_json(path: Path) -> TrackingSequence:
    doc = json.loads(path.read_text())
    pitch, sample_rate, rosters, attack = _parse_metadata(doc.get("metadata", {}), str(path))
    frames = []
    for i, fd in enumerate(doc.get("frames", [])):
        try:
            frames.append(
                Frame(
                    period=int(fd["period"]),
                    time=float(fd["time"]),
                    players={pid: np.array(p, dtype=float) for pid, p in fd["players"].items()},
                    ball=np.array(fd["ball"], dtype=float),
                    possession_team=fd.get("possession_team"),
                    possessor=fd.get("possessor"),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: frame {i}: {exc}") from exc
    frames.sort(key=lambda f: (f.period, f.time))
    frames = _resample_if_needed(frames, sample_rate)
    events = []
    for i, ed in enumerate(doc.get("events", [])):
        try:
            events.append(
                Event(
                    period=int(ed["period"]),
                    time=float(ed["time"]),
                    end_time=ed.get("end_time"),
                    kind=ed["kind"],
                    team=ed.get("team"),
                    actor=ed.get("actor"),
                    target=ed.get("target"),
                    start=tuple(ed["start"]) if ed.get("start") else None,
                    end=tuple(ed["end"]) if ed.get("end") else None,
                )
            )
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise ParseError(f"{path}: event {i}: {exc}") from exc
    return TrackingSequence(pitch, frames, sample_rate, rosters, attack, tuple(events))


def _to_json_doc(seq: TrackingSequence) -> dict:
    return {
        "format": "tracking-json",
        "version": 1,
        "metadata": _metadata_doc(seq),
        "frames": [
            {
                "period": f.period,
                "time": round(f.time, 3),
                "players": {
                    pid: [round(float(p[0]), 2), round(float(p[1]), 2)]
                    for pid, p in sorted(f.players.items())
                },
                "ball": [round(float(f.ball[0]), 2), round(float(f.ball[1]), 2)],
                "possession_team": f.possession_team,
                "possessor": f.possessor,
            }
            for f in seq.frames
        ],
        "events": [
            {
                "period": e.period,
                "time": round(e.time, 3),
                "end_time": round(e.end_time, 3) if e.end_time is not None else None,
                "kind": e.kind,
                "team": e.team,
                "actor": e.actor,
                "target": e.target,
                "start": [round(e.start[0], 2), round(e.start[1], 2)] if e.start else None,
                "end": [round(e.end[0], 2), round(e.end[1], 2)] if e.end else None,
            }
            for e in seq.events
        ],
    }


def _write_table(seq: TrackingSequence, base: Path) -> None:
    with open(base / "tracking.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_TRACKING_COLUMNS)
        for frame in seq.frames:
            writer.writerow(
                [
                    frame.period,
                    f"{frame.time:.3f}",
                    "ball",
                    "",
                    "",
                    f"{float(frame.ball[0]):.2f}",
                    f"{float(frame.ball[1]):.2f}",
                    frame.possession_team or "",
                    frame.possessor or "",
                ]
            )
            for pid in sorted(frame.players):
                pos = frame.players[pid]
                writer.writerow(
                    [
                        frame.period,
                        f"{frame.time:.3f}",
                        "player",
                        seq.team_of(pid),
                        pid,
                        f"{float(pos[0]):.2f}",
                        f"{float(pos[1]):.2f}",
                        "",
                        "",
                    ]
                )
    (base / "metadata.json").write_text(json.dumps(_metadata_doc(seq), indent=1))
    with open(base / "events.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_EVENT_COLUMNS)
        for e in seq.events:
            writer.writerow(
                [
                    e.period,
                    f"{e.time:.3f}",
                    f"{e.end_time:.3f}" if e.end_time is not None else "",
                    e.kind,
                    e.team or "",
                    e.actor or "",
                    e.target or "",
                    f"{e.start[0]:.2f}" if e.start else "",
                    f"{e.start[1]:.2f}" if e.start else "",
                    f"{e.end[0]:.2f}" if e.end else "",
                    f"{e.end[1]:.2f}" if e.end else "",
                ]
            )


def _resample_if_needed(frames: list[Frame], sample_rate: float) -> list[Frame]:
    step = 1.0 / sample_rate
    out: list[Frame] = []
    periods = sorted({f.period for f in frames})
    for period in periods:
        group = [f for f in frames if f.period == period]
        deltas = [b.time - a.time for a, b in zip(group, group[1:])]
        if all(abs(d - step) <= 1e-3 for d in deltas):
            out.extend(group)
            continue
        out.extend(_resample_period(group, step))
    return out


def _resample_period(group: list[Frame], step: float) -> list[Frame]:
    t0, t_last = group[0].time, group[-1].time
    n = int(math.floor((t_last - t0) / step + 1e-9)) + 1
    times = [t0 + k * step for k in range(n)]
    src_times = [f.time for f in group]
    resampled = []
    j = 0
    for t in times:
        while j + 1 < len(group) and src_times[j + 1] <= t:
            j += 1
        left = group[j]
        if j + 1 < len(group) and src_times[j] < t:
            right = group[j + 1]
            w = (t - src_times[j]) / (src_times[j + 1] - src_times[j])
        else:
            right, w = left, 0.0
        players = {}
        for pid, p0 in left.players.items():
            p1 = right.players.get(pid)
            if p1 is None:
                continue
            players[pid] = p0 + (p1 - p0) * w
        ball = left.ball + (right.ball - left.ball) * w
        resampled.append(
            Frame(
                period=left.period,
                time=round(t, 3),
                players=players,
                ball=ball,
                possession_team=left.possession_team,
                possessor=left.possessor,
            )
        )
    return resampled
