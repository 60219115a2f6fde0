"""Shared fixture builders for the test suite."""

from __future__ import annotations

import numpy as np

from sprintcat.tracking import Event, Frame, Pitch, Roster, TrackingSequence


def make_sequence(
    positions: dict[str, np.ndarray],
    ball: np.ndarray,
    rate: float = 10.0,
    period: int = 1,
    possession_team: list | None = None,
    possessor: list | None = None,
    events: tuple[Event, ...] = (),
    pitch: Pitch | None = None,
    extra_players: tuple[str, ...] = (),
) -> TrackingSequence:
    """Build a one-period sequence from per-player position arrays.

    Player ids starting with "H" join the home roster, "A" the away roster.
    Rows of NaN mark absent frames. H01/A01 are goalkeepers when present.
    """
    ball = np.asarray(ball, dtype=float)
    n = len(ball)
    times = np.round(np.arange(n) / rate, 3)
    frames = []
    for i in range(n):
        players = {}
        for pid, track in positions.items():
            row = np.asarray(track, dtype=float)[i]
            if np.any(np.isnan(row)):
                continue
            players[pid] = row
        frames.append(
            Frame(
                period=period,
                time=float(times[i]),
                players=players,
                ball=ball[i],
                possession_team=possession_team[i] if possession_team else None,
                possessor=possessor[i] if possessor else None,
            )
        )
    ids = set(positions) | set(extra_players)
    home = tuple(sorted(p for p in ids if p.startswith("H")))
    away = tuple(sorted(p for p in ids if p.startswith("A")))
    home = home or ("H99",)
    away = away or ("A99",)
    rosters = (
        Roster("home", home, "H01" if "H01" in home else None),
        Roster("away", away, "A01" if "A01" in away else None),
    )
    attack = {("home", period): 1, ("away", period): -1}
    return TrackingSequence(
        pitch or Pitch(), frames, rate, rosters, attack, events
    )


def still(point: tuple[float, float], n: int) -> np.ndarray:
    """A track that stays put."""
    return np.tile(np.asarray(point, dtype=float), (n, 1))
