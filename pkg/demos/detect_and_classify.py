"""
From raw positions to a labeled sprint
======================================

Walk one scripted attacking scene through the whole pipeline: detect the
run effort from the speed signal, promote it to a sprint, and let the rule
engine explain which tactical pattern it saw.
"""

# A scripted scene: 22 players, one striker breaking beyond the back line.
from sprintcat.synth import Scenario, generate

sequence, roles, expected = generate(Scenario("PEN"))
print("scenario ground truth:", expected[0])

# Stage 1 - detection. Speeds come from the positions (0.5 s moving
# average); run efforts are cut at deep valleys; efforts whose peak clears
# 21 km/h are sprints.
from sprintcat.detection import detect_all_sprints

sprints = detect_all_sprints(sequence)
for s in sprints:
    print(
        f"sprint: {s.player_id} period {s.period} "
        f"[{s.start_time:.1f}s, {s.end_time:.1f}s] "
        f"peak {s.peak_speed:.1f} km/h over {s.distance:.1f} m"
    )

# Stage 2 - classification. Every category's conditions are evaluated and
# the trace keeps each verdict, so the winning label can be audited.
from sprintcat.rules import classify_match

for sprint, cls in classify_match(sequence, roles=roles):
    print(f"\nphase:    {cls.phase}")
    print(f"category: {cls.category}  (all matched: {sorted(cls.matched)})")
    print("trace for the winning category:")
    for letter, verdict in cls.trace[cls.category].items():
        print(f"  condition {letter}: {verdict}")
