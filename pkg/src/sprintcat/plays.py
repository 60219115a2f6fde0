"""Play segmentation, category tagging, and similar-play retrieval.

A play is one team's spell of possession. It opens when that team gains the
ball and closes at the first of: the opposing team producing three consecutive
events (the play ends at the first of the three), a pause event, or the end of
the period. One or two stray opponent touches do not end the spell.

Retrieval ranks candidate plays, prefiltered by their sprint-category
signature, under a pluggable similarity backend. The baseline backend
resamples both plays to a fixed number of temporal samples and averages, per
sample, the optimal-assignment distance between possessing sides, between
defending sides, and the ball-position distance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import DEFAULT_CONFIG, Config
from .detection import Sprint
from .rules import Classification
from .tracking import Frame, ParseError, TrackingSequence, normalize

_EPS = 1e-9


@dataclass(frozen=True)
class Play:
    """One team's possession spell plus the sprint categories seen during it."""

    team: str
    period: int
    start_time: float
    end_time: float
    sprint_categories: tuple[str, ...] = ()  # sorted, with repeats

    def __post_init__(self) -> None:
        if self.end_time <= self.start_time:
            raise ValueError("play must end after it starts")
        object.__setattr__(
            self, "sprint_categories", tuple(sorted(self.sprint_categories))
        )

    @property
    def signature(self) -> frozenset:
        return frozenset(self.sprint_categories)

    def overlaps(self, period: int, start: float, end: float) -> bool:
        return (
            period == self.period
            and start <= self.end_time + _EPS
            and end >= self.start_time - _EPS
        )

    def frames(self, seq: TrackingSequence) -> list[Frame]:
        return seq.frames_in(self.period, self.start_time, self.end_time)


def segment_plays(seq: TrackingSequence) -> list[Play]:
    """Split each period into an alternating chain of possession plays."""
    plays: list[Play] = []
    for period in seq.periods():
        _, t_last = seq.period_span(period)
        frames = seq.frames_in(period, *seq.period_span(period))
        events = [
            e
            for e in seq.events
            if e.period == period and (e.kind == "pause" or e.team in seq.teams)
        ]
        opening = _next_opening(frames, events, after=-np.inf)
        while opening is not None:
            start, team = opening
            close, opening = _scan_until_close(seq, frames, events, team, start, t_last)
            if close > start + _EPS:
                plays.append(Play(team=team, period=period, start_time=start, end_time=close))
    return plays


def _next_opening(frames, events, after: float):
    """Earliest possession after ``after``: annotated frame or attributable event."""
    candidates = []
    for f in frames:
        if f.time > after + _EPS and f.possession_team is not None:
            candidates.append((f.time, f.possession_team))
            break
    for e in events:
        if e.time > after + _EPS and e.kind != "pause" and e.team is not None:
            candidates.append((e.time, e.team))
            break
    return min(candidates, default=None)


def _scan_until_close(seq, frames, events, team, start, t_last):
    """Close time of the play opened by ``team`` at ``start`` and, when the
    ball changes hands on the spot, the next play's opening."""
    streak = 0
    streak_first = 0.0
    for e in events:
        if e.time < start - _EPS:
            continue
        if e.kind == "pause":
            return e.time, _next_opening(frames, events, after=e.time)
        if e.team == team:
            streak = 0
            continue
        streak += 1
        if streak == 1:
            streak_first = e.time
        if streak == 3:
            return streak_first, (streak_first, seq.opponent_of(team))
    return t_last, None


def tag_plays(
    plays: list[Play], classified: list[tuple[Sprint, Classification]]
) -> list[Play]:
    """Attach to each play the categories of all sprints overlapping it."""
    tagged = []
    for play in plays:
        cats = sorted(
            cls.category
            for sprint, cls in classified
            if play.overlaps(sprint.period, sprint.start_time, sprint.end_time)
        )
        tagged.append(replace(play, sprint_categories=tuple(cats)))
    return tagged


# -- similarity backends ----------------------------------------------------------

BACKENDS: dict[str, Callable] = {}


def register_backend(name: str, fn: Callable) -> None:
    BACKENDS[name] = fn


def _nearest_frames(seq: TrackingSequence, play: Play, n: int) -> list[Frame]:
    frames = play.frames(seq)
    if not frames:
        raise ValueError("play interval covers no frames")
    times = np.array([f.time for f in frames])
    wanted = np.linspace(play.start_time, play.end_time, n)
    idx = np.clip(np.searchsorted(times, wanted), 0, len(frames) - 1)
    back = np.clip(idx - 1, 0, len(frames) - 1)
    choose_back = np.abs(times[back] - wanted) <= np.abs(times[idx] - wanted)
    return [frames[b if cb else i] for i, b, cb in zip(idx, back, choose_back)]


def _side_distance(
    pos_a: dict[str, np.ndarray], pos_b: dict[str, np.ndarray], penalty: float
) -> float:
    """Optimal-assignment distance between two player sets, per player."""
    a = np.array([pos_a[p] for p in sorted(pos_a)]) if pos_a else np.empty((0, 2))
    b = np.array([pos_b[p] for p in sorted(pos_b)]) if pos_b else np.empty((0, 2))
    n = max(len(a), len(b), 1)
    if len(a) == 0 or len(b) == 0:
        return penalty * max(len(a), len(b)) / n
    cost = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    rows, cols = linear_sum_assignment(cost)
    total = float(cost[rows, cols].sum()) + penalty * (n - len(rows))
    return total / n


def assignment_distance(
    seq: TrackingSequence, a: Play, b: Play, config: Config = DEFAULT_CONFIG
) -> float:
    """Baseline similarity: lower is more alike, 0 for identical plays.

    Both plays are viewed with their possessing team attacking +x, so the
    possessing sides are compared to each other and likewise the defending
    sides, regardless of team identity and playing direction.
    """
    n = config.play_resample_samples
    penalty = config.retrieval_unmatched_penalty_m
    view_a, view_b = normalize(seq, a.team), normalize(seq, b.team)
    frames_a = _nearest_frames(seq, a, n)
    frames_b = _nearest_frames(seq, b, n)
    total = 0.0
    for fa, fb in zip(frames_a, frames_b):
        d = float(np.linalg.norm(view_a.ball(fa) - view_b.ball(fb)))
        for side in ("own", "opponent"):
            team_a = a.team if side == "own" else seq.opponent_of(a.team)
            team_b = b.team if side == "own" else seq.opponent_of(b.team)
            d += _side_distance(
                view_a.team_players(fa, team_a),
                view_b.team_players(fb, team_b),
                penalty,
            )
        total += d
    return total / n


register_backend("assignment", assignment_distance)


# -- the index --------------------------------------------------------------------

INDEX_FORMAT = "sprint-play-index"
INDEX_VERSION = 1


@dataclass(frozen=True)
class PlayIndex:
    """Immutable set of tagged plays plus the similarity backend to rank with."""

    plays: tuple[Play, ...]
    backend: str = "assignment"

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "plays",
            tuple(sorted(self.plays, key=lambda p: (p.period, p.start_time, p.team))),
        )
        spans: dict[tuple[str, int], float] = {}
        for p in self.plays:
            key = (p.team, p.period)
            if key in spans and p.start_time < spans[key] - _EPS:
                raise ValueError(
                    f"overlapping plays for team {p.team} in period {p.period}"
                )
            spans[key] = max(spans.get(key, -np.inf), p.end_time)

    def signatures(self) -> list[frozenset]:
        return [p.signature for p in self.plays]


def build_index(
    seq: TrackingSequence,
    classified: list[tuple[Sprint, Classification]] | None = None,
    backend: str = "assignment",
) -> PlayIndex:
    if backend not in BACKENDS:
        raise ValueError(f"unknown similarity backend {backend!r}")
    plays = tag_plays(segment_plays(seq), classified or [])
    return PlayIndex(plays=tuple(plays), backend=backend)


def filter_by_keywords(
    index: PlayIndex, required: frozenset | set, mode: str = "superset"
) -> list[Play]:
    """Plays whose category signature contains (or equals) ``required``."""
    required = frozenset(required)
    if mode == "superset":
        return [p for p in index.plays if p.signature >= required]
    if mode == "exact":
        return [p for p in index.plays if p.signature == required]
    raise ValueError(f"unknown filter mode {mode!r}")


def retrieve(
    index: PlayIndex,
    seq: TrackingSequence,
    query: Play,
    k: int = 5,
    required: frozenset | set = frozenset(),
    mode: str = "superset",
    config: Config = DEFAULT_CONFIG,
) -> list[tuple[Play, float]]:
    """Top-k plays most similar to ``query`` among keyword survivors."""
    if index.backend not in BACKENDS:
        raise ValueError(f"unknown similarity backend {index.backend!r}")
    distance = BACKENDS[index.backend]
    ranked = [
        (play, distance(seq, query, play, config))
        for play in filter_by_keywords(index, required, mode)
    ]
    ranked.sort(key=lambda pd: (pd[1], pd[0].period, pd[0].start_time, pd[0].team))
    return ranked[:k]


# -- persistence ------------------------------------------------------------------


def save_index(index: PlayIndex, path: str | Path) -> None:
    doc = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "backend": index.backend,
        "plays": [
            {
                "team_id": p.team,
                "period": p.period,
                "start_s": round(p.start_time, 3),
                "end_s": round(p.end_time, 3),
                "categories": list(p.sprint_categories),
            }
            for p in index.plays
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_index(path: str | Path) -> PlayIndex:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict) or doc.get("format") != INDEX_FORMAT:
        raise ParseError(f"{path}: not a {INDEX_FORMAT} file")
    if doc.get("version") != INDEX_VERSION:
        raise ParseError(f"{path}: unsupported version {doc.get('version')!r}")
    try:
        plays = tuple(
            Play(
                team=p["team_id"],
                period=int(p["period"]),
                start_time=float(p["start_s"]),
                end_time=float(p["end_s"]),
                sprint_categories=tuple(p["categories"]),
            )
            for p in doc["plays"]
        )
        return PlayIndex(plays=plays, backend=doc["backend"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed play entry ({exc})") from None


def play_rows(plays: list[Play]) -> list[dict]:
    """Flat export records for plays (optionally with retrieval distances)."""
    return [
        {
            "team": p.team,
            "period": p.period,
            "start_s": round(p.start_time, 3),
            "end_s": round(p.end_time, 3),
            "categories": "|".join(p.sprint_categories),
        }
        for p in plays
    ]
