"""Tactical roles: vocabulary, timelines, and formation-template assignment.

A role timeline stores which role each player occupied over which stretch of
a period. Timelines can be loaded from a CSV or derived from tracking data by
matching windowed mean positions against formation templates.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import DEFAULT_CONFIG, Config
from .tracking import Frame, ParseError, TrackingSequence, ValidationError, normalize

ROLE_GK = "GK"

OUTFIELD_ROLES: tuple[str, ...] = (
    "LB", "LCB", "CB", "RCB", "RB",
    "LWB", "RWB",
    "LDM", "CDM", "RDM",
    "LM", "LCM", "RCM", "RM", "CAM",
    "LCF", "CF", "RCF",
)

# codes accepted on input but never produced by assignment
_LEGACY_ROLES = ("CM", "LAM", "RAM")

ACCEPTED_ROLE_CODES = frozenset(OUTFIELD_ROLES) | frozenset(_LEGACY_ROLES) | {ROLE_GK}

BACK_LINE_ROLES = frozenset({"LB", "LCB", "CB", "RCB", "RB"})
SIDE_ROLES = frozenset({"LB", "LWB", "LM", "RB", "RWB", "RM"})

MIRROR_ROLE = {
    "LB": "RB", "RB": "LB",
    "LCB": "RCB", "RCB": "LCB",
    "LWB": "RWB", "RWB": "LWB",
    "LDM": "RDM", "RDM": "LDM",
    "LM": "RM", "RM": "LM",
    "LCM": "RCM", "RCM": "LCM",
    "LCF": "RCF", "RCF": "LCF",
    "CB": "CB", "CDM": "CDM", "CAM": "CAM", "CF": "CF",
}

# Template positions in meters, +x toward the opponents' goal, +y the left
# flank. Only the shape matters: templates are centered and scaled before use.
FORMATIONS: dict[str, dict[str, tuple[float, float]]] = {
    "4-4-2": {
        "LB": (-15, 15), "LCB": (-15, 5), "RCB": (-15, -5), "RB": (-15, -15),
        "LM": (0, 15), "LCM": (0, 5), "RCM": (0, -5), "RM": (0, -15),
        "LCF": (15, 5), "RCF": (15, -5),
    },
    "4-3-3": {
        "LB": (-15, 15), "LCB": (-15, 5), "RCB": (-15, -5), "RB": (-15, -15),
        "CDM": (-5, 0), "LCM": (2, 8), "RCM": (2, -8),
        "LM": (12, 18), "RM": (12, -18), "CF": (15, 0),
    },
    "3-5-2": {
        "LCB": (-15, 8), "CB": (-16, 0), "RCB": (-15, -8),
        "LWB": (0, 22), "RWB": (0, -22),
        "LCM": (0, 8), "CDM": (-5, 0), "RCM": (0, -8),
        "LCF": (14, 5), "RCF": (14, -5),
    },
    "4-2-3-1": {
        "LB": (-15, 15), "LCB": (-15, 5), "RCB": (-15, -5), "RB": (-15, -15),
        "LDM": (-5, 5), "RDM": (-5, -5),
        "LM": (8, 16), "CAM": (8, 0), "RM": (8, -16),
        "CF": (16, 0),
    },
    "3-4-3": {
        "LCB": (-15, 8), "CB": (-16, 0), "RCB": (-15, -8),
        "LM": (0, 18), "LCM": (0, 6), "RCM": (0, -6), "RM": (0, -18),
        "LCF": (13, 10), "CF": (16, 0), "RCF": (13, -10),
    },
}


def _normalized_shape(points: np.ndarray) -> np.ndarray:
    centered = points - points.mean(axis=0)
    scale = float(np.sqrt((centered**2).sum(axis=1).mean()))
    return centered / (scale or 1.0)


_TEMPLATE_SHAPES: dict[str, tuple[tuple[str, ...], np.ndarray]] = {
    name: (
        tuple(slots),
        _normalized_shape(np.array([slots[r] for r in slots], dtype=float)),
    )
    for name, slots in FORMATIONS.items()
}


@dataclass(frozen=True)
class RoleInterval:
    """One player's role over [start, end] within a period."""

    team: str
    player: str
    period: int
    start: float
    end: float
    role: str

    def __post_init__(self) -> None:
        if self.role not in ACCEPTED_ROLE_CODES:
            raise ValidationError(f"unknown role code {self.role!r}")
        if self.end <= self.start:
            raise ValidationError(
                f"role interval for {self.player} has end {self.end} <= start {self.start}"
            )


class RoleTimeline:
    """Role intervals indexed per player; at a shared boundary the later
    interval wins."""

    def __init__(self, intervals: Iterable[RoleInterval]) -> None:
        self.intervals = tuple(
            sorted(intervals, key=lambda iv: (iv.period, iv.start, iv.team, iv.player))
        )
        self._by_player: dict[str, list[RoleInterval]] = {}
        self._team_of: dict[str, str] = {}
        for iv in self.intervals:
            self._by_player.setdefault(iv.player, []).append(iv)
            known = self._team_of.setdefault(iv.player, iv.team)
            if known != iv.team:
                raise ValidationError(f"player {iv.player} appears on two teams")
        for player, ivs in self._by_player.items():
            for a, b in zip(ivs, ivs[1:]):
                if a.period == b.period and b.start < a.end - 1e-9:
                    raise ValidationError(
                        f"overlapping role intervals for {player} in period {a.period}"
                    )

    def role_at(self, player: str, period: int, time: float) -> str | None:
        hit = None
        for iv in self._by_player.get(player, ()):
            if iv.period != period:
                continue
            if iv.start - 1e-9 <= time <= iv.end + 1e-9:
                hit = iv
        return hit.role if hit else None

    def players_at(self, team: str, period: int, time: float) -> dict[str, str]:
        """Mapping of player to role for everyone on ``team`` covered at ``time``."""
        out = {}
        for player, ivs in self._by_player.items():
            if self._team_of[player] != team:
                continue
            role = self.role_at(player, period, time)
            if role is not None:
                out[player] = role
        return out

    def team_of(self, player: str) -> str | None:
        return self._team_of.get(player)

    def players(self, team: str | None = None) -> set[str]:
        if team is None:
            return set(self._by_player)
        return {p for p, t in self._team_of.items() if t == team}

    def merged_with(self, other: "RoleTimeline") -> "RoleTimeline":
        return RoleTimeline(self.intervals + other.intervals)


_ROLE_COLUMNS = ["period", "start_s", "end_s", "team_id", "player_id", "role_code"]


def load_roles(path: str | Path) -> RoleTimeline:
    path = Path(path)
    intervals = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _ROLE_COLUMNS:
            raise ParseError(f"{path}:1: bad or missing header row")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(_ROLE_COLUMNS):
                raise ParseError(f"{path}:{lineno}: expected {len(_ROLE_COLUMNS)} fields")
            try:
                intervals.append(
                    RoleInterval(
                        period=int(row[0]),
                        start=float(row[1]),
                        end=float(row[2]),
                        team=row[3],
                        player=row[4],
                        role=row[5],
                    )
                )
            except (ValueError, ValidationError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    try:
        return RoleTimeline(intervals)
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def save_roles(timeline: RoleTimeline, path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_ROLE_COLUMNS)
        for iv in timeline.intervals:
            writer.writerow(
                [iv.period, f"{iv.start:.3f}", f"{iv.end:.3f}", iv.team, iv.player, iv.role]
            )
    return path


# -- assignment from tracking -------------------------------------------------


def assign_roles(
    seq: TrackingSequence, team: str, config: Config = DEFAULT_CONFIG
) -> RoleTimeline:
    """Derive a role timeline for ``team`` from windowed mean positions.

    Each window of ``config.role_window_s`` seconds is matched against every
    formation template with an optimal assignment on centered, scale-free
    positions; the cheapest formation names the window's roles. Windows where
    fewer than ten outfield players are seen enough are resolved from their
    neighbors; if no window of a period has ten, shape matching falls back to
    however many players are present.
    """
    roster = seq.roster(team)
    view = normalize(seq, team)
    gk = roster.goalkeeper
    intervals: list[RoleInterval] = []
    for period in seq.periods():
        t0, t1 = seq.period_span(period)
        edges = [t0]
        while edges[-1] + config.role_window_s < t1 - 1e-9:
            edges.append(edges[-1] + config.role_window_s)
        edges.append(t1)
        windows = [
            seq.frames_in(period, lo, hi) for lo, hi in zip(edges, edges[1:])
        ]
        assigned = [_assign_window(seq, view, team, gk, frames, full=True) for frames in windows]
        if all(a is None for a in assigned):
            assigned = [
                _assign_window(seq, view, team, gk, frames, full=False)
                for frames in windows
            ]
        assigned = _fill_gaps(assigned)
        intervals.extend(_windows_to_intervals(team, period, edges, assigned))
        if gk is not None and any(
            gk in f.players for frames in windows for f in frames
        ):
            intervals.append(RoleInterval(team, gk, period, t0, t1, ROLE_GK))
    return RoleTimeline(intervals)


def assign_all_roles(seq: TrackingSequence, config: Config = DEFAULT_CONFIG) -> RoleTimeline:
    a, b = seq.teams
    return assign_roles(seq, a, config).merged_with(assign_roles(seq, b, config))


def _assign_window(
    seq: TrackingSequence,
    view,
    team: str,
    gk: str | None,
    frames: Sequence[Frame],
    full: bool,
) -> dict[str, str] | None:
    """Role mapping for one window, or None when it cannot be resolved."""
    if not frames:
        return None
    counts: dict[str, int] = {}
    sums: dict[str, np.ndarray] = {}
    for frame in frames:
        sign = view.sign(frame.period)
        for pid, pos in frame.players.items():
            if seq.team_of(pid) != team or pid == gk:
                continue
            counts[pid] = counts.get(pid, 0) + 1
            sums[pid] = sums.get(pid, np.zeros(2)) + pos * sign
    need = max(1, len(frames) // 2)
    participants = sorted(pid for pid, c in counts.items() if c >= need)
    if len(participants) < (10 if full else 2):
        return None
    means = np.array([sums[p] / counts[p] for p in participants])
    shape = _normalized_shape(means)
    best: tuple[float, dict[str, str]] | None = None
    for name, (slots, template) in _TEMPLATE_SHAPES.items():
        cost = ((shape[:, None, :] - template[None, :, :]) ** 2).sum(axis=2)
        rows, cols = linear_sum_assignment(cost)
        total = float(cost[rows, cols].sum())
        if best is None or total < best[0] - 1e-12:
            mapping = {participants[r]: slots[c] for r, c in zip(rows, cols)}
            best = (total, mapping)
    return best[1] if best else None


def _fill_gaps(assigned: list[dict[str, str] | None]) -> list[dict[str, str] | None]:
    out = list(assigned)
    for i in range(1, len(out)):
        if out[i] is None:
            out[i] = out[i - 1]
    for i in range(len(out) - 2, -1, -1):
        if out[i] is None:
            out[i] = out[i + 1]
    return out


def _windows_to_intervals(
    team: str, period: int, edges: list[float], assigned: list[dict[str, str] | None]
) -> list[RoleInterval]:
    intervals: list[RoleInterval] = []
    players = set()
    for mapping in assigned:
        if mapping:
            players.update(mapping)
    for player in sorted(players):
        start_k: int | None = None
        current: str | None = None
        for k, mapping in enumerate(assigned):
            role = mapping.get(player) if mapping else None
            if role != current:
                if current is not None and start_k is not None:
                    intervals.append(
                        RoleInterval(team, player, period, edges[start_k], edges[k], current)
                    )
                start_k, current = k, role
        if current is not None and start_k is not None:
            intervals.append(
                RoleInterval(team, player, period, edges[start_k], edges[-1], current)
            )
    return intervals
