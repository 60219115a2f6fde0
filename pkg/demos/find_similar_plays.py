"""
Keyword-guided similar-play retrieval
=====================================

Build a miniature match with three possession spells, tag each play with
the sprint categories seen during it, then retrieve the plays most similar
to a query play - optionally restricted to plays containing required
categories.
"""

import numpy as np

from sprintcat.detection import RunEffort, Sprint
from sprintcat.plays import build_index, filter_by_keywords, play_rows, retrieve
from sprintcat.rules import Classification
from sprintcat.tracking import Event, Frame, Pitch, Roster, TrackingSequence

# -- a 30 s mini-match: four players wander between random waypoints ---------
rng = np.random.default_rng(7)
n = 301
tracks = {}
for pid in ("H01", "H02", "A01", "A02"):
    waypoints = rng.uniform(-20.0, 20.0, (4, 2))
    legs = [np.linspace(waypoints[k], waypoints[k + 1], 101)[:-1] for k in range(2)]
    tracks[pid] = np.concatenate(legs + [np.linspace(waypoints[2], waypoints[3], 101)])

frames = [
    Frame(
        period=1,
        time=round(i / 10.0, 3),
        players={pid: tracks[pid][i] for pid in tracks},
        ball=np.zeros(2),
    )
    for i in range(n)
]

# Possession plays are read from the event stream: a play closes when the
# opponent strings three events together (or on a pause).
events = tuple(
    Event(period=1, time=t, kind="reception", team=team)
    for t, team in (
        (0.5, "home"),
        (10.0, "away"), (10.5, "away"), (11.0, "away"),
        (20.0, "home"), (20.5, "home"), (21.0, "home"),
    )
)

sequence = TrackingSequence(
    Pitch(),
    frames,
    sample_rate=10.0,
    rosters=(Roster("home", ("H01", "H02"), "H01"), Roster("away", ("A01", "A02"), "A01")),
    attack_direction={("home", 1): 1, ("away", 1): -1},
    events=events,
)

# Two sprints, one in each of the first two plays.
def labeled_sprint(player, start, end, category):
    effort = RunEffort(player, 1, start, end, (start + end) / 2, 25.0)
    sprint = Sprint(effort, distance=30.0, mean_speed=24.0)
    return sprint, Classification(category, "attacking", frozenset(), {})

classified = [
    labeled_sprint("H02", 2.0, 5.0, "RWB"),
    labeled_sprint("A02", 12.0, 15.0, "PEN"),
]

# Build the index: three plays, tagged by overlap with the sprints.
index = build_index(sequence, classified)
for row in play_rows(list(index.plays)):
    print("play:", row)

# Keyword filtering keeps only plays whose categories cover the request.
with_pen = filter_by_keywords(index, {"PEN"})
print(f"\n{len(with_pen)} of {len(index.plays)} plays contain a PEN sprint")

# Similarity search: the query play always comes back first at distance 0,
# because every trajectory matches itself exactly.
query = index.plays[0]
print("\nranked against play 0:")
for play, distance in retrieve(index, sequence, query, k=3):
    marker = "  <- query itself" if play == query else ""
    print(f"distance {distance:8.3f}  {play.team} [{play.start_time:.1f}s, {play.end_time:.1f}s]{marker}")
