"""Role vocabulary, timelines, and formation-template assignment."""

from itertools import permutations

import numpy as np
import pytest

from support import make_sequence, still
from sprintcat.config import DEFAULT_CONFIG
from sprintcat.roles import (
    FORMATIONS,
    MIRROR_ROLE,
    OUTFIELD_ROLES,
    ROLE_GK,
    RoleInterval,
    RoleTimeline,
    assign_roles,
    load_roles,
    save_roles,
)
from sprintcat.tracking import ParseError, ValidationError


def test_every_role_appears_in_some_formation():
    used = {role for slots in FORMATIONS.values() for role in slots}
    assert used == set(OUTFIELD_ROLES)
    for slots in FORMATIONS.values():
        assert len(slots) == 10


def test_formation_templates_are_mirror_symmetric():
    for name, slots in FORMATIONS.items():
        for role, (x, y) in slots.items():
            twin = MIRROR_ROLE[role]
            assert twin in slots, f"{name}: {role} lacks its mirror"
            tx, ty = slots[twin]
            assert (tx, ty) == (x, -y), f"{name}: {role}/{twin} not mirrored"


def test_mirror_is_an_involution():
    for role, twin in MIRROR_ROLE.items():
        assert MIRROR_ROLE[twin] == role


def test_role_interval_validation():
    with pytest.raises(ValidationError):
        RoleInterval("home", "H02", 1, 0.0, 10.0, "STRIKER")
    with pytest.raises(ValidationError):
        RoleInterval("home", "H02", 1, 10.0, 10.0, "CF")


def test_timeline_rejects_overlap_and_two_teams():
    a = RoleInterval("home", "H02", 1, 0.0, 10.0, "LM")
    b = RoleInterval("home", "H02", 1, 8.0, 20.0, "RM")
    with pytest.raises(ValidationError, match="overlap"):
        RoleTimeline([a, b])
    c = RoleInterval("away", "H02", 2, 0.0, 10.0, "LM")
    with pytest.raises(ValidationError, match="two teams"):
        RoleTimeline([a, c])


def test_role_at_boundary_goes_to_later_interval():
    tl = RoleTimeline(
        [
            RoleInterval("home", "H02", 1, 0.0, 10.0, "LM"),
            RoleInterval("home", "H02", 1, 10.0, 20.0, "RM"),
        ]
    )
    assert tl.role_at("H02", 1, 5.0) == "LM"
    assert tl.role_at("H02", 1, 10.0) == "RM"
    assert tl.role_at("H02", 1, 20.0) == "RM"
    assert tl.role_at("H02", 1, 20.1) is None
    assert tl.role_at("H02", 2, 5.0) is None
    assert tl.role_at("H99", 1, 5.0) is None


def test_players_at_filters_by_team():
    tl = RoleTimeline(
        [
            RoleInterval("home", "H02", 1, 0.0, 10.0, "LM"),
            RoleInterval("home", "H03", 1, 0.0, 10.0, "CF"),
            RoleInterval("away", "A02", 1, 0.0, 10.0, "CB"),
        ]
    )
    assert tl.players_at("home", 1, 3.0) == {"H02": "LM", "H03": "CF"}
    assert tl.players_at("away", 1, 3.0) == {"A02": "CB"}
    assert tl.players("home") == {"H02", "H03"}


def test_roles_csv_round_trip(tmp_path):
    tl = RoleTimeline(
        [
            RoleInterval("home", "H02", 1, 0.0, 300.0, "LM"),
            RoleInterval("home", "H02", 1, 300.0, 540.5, "RM"),
            RoleInterval("away", "A07", 2, 0.0, 540.5, ROLE_GK),
        ]
    )
    path = save_roles(tl, tmp_path / "roles.csv")
    back = load_roles(path)
    assert back.intervals == tl.intervals


def test_roles_csv_reports_locus(tmp_path):
    path = tmp_path / "roles.csv"
    path.write_text(
        "period,start_s,end_s,team_id,player_id,role_code\n"
        "1,0.0,10.0,home,H02,LM\n"
        "1,abc,10.0,home,H03,CF\n"
    )
    with pytest.raises(ParseError, match=r"roles\.csv:3"):
        load_roles(path)


# -- assignment ---------------------------------------------------------------


def _parked_sequence(formation="4-4-2", n=30, offset=(-20.0, 0.0), flip_y=False):
    slots = FORMATIONS[formation]
    tracks = {"H01": still((-50.0, 0.0), n), "A01": still((50.0, 0.0), n)}
    expected = {}
    for k, (role, (x, y)) in enumerate(sorted(slots.items())):
        pid = f"H{k + 2:02d}"
        yy = -y if flip_y else y
        tracks[pid] = still((x + offset[0], yy + offset[1]), n)
        expected[pid] = role
    # away side parked mirrorwise so their own view sees the same shape
    for k, (role, (x, y)) in enumerate(sorted(slots.items())):
        pid = f"A{k + 2:02d}"
        tracks[pid] = still((-(x + offset[0]), -(y + offset[1])), n)
    return make_sequence(tracks, ball=still((0, 0), n)), expected


def test_parked_formation_is_recovered_exactly():
    seq, expected = _parked_sequence("4-4-2")
    tl = assign_roles(seq, "home")
    for pid, role in expected.items():
        assert tl.role_at(pid, 1, 1.0) == role, pid
    assert tl.role_at("H01", 1, 1.0) == ROLE_GK
    # the away team parked point-reflected: same roles in its own view
    tl_away = assign_roles(seq, "away")
    for pid, role in expected.items():
        assert tl_away.role_at("A" + pid[1:], 1, 1.0) == role


@pytest.mark.parametrize("formation", sorted(FORMATIONS))
def test_each_parked_formation_recovers_its_own_roles(formation):
    seq, expected = _parked_sequence(formation)
    tl = assign_roles(seq, "home")
    got = {pid: tl.role_at(pid, 1, 1.0) for pid in expected}
    assert got == expected


def test_mirrored_positions_get_mirrored_roles():
    seq, expected = _parked_sequence("4-2-3-1", flip_y=True)
    tl = assign_roles(seq, "home")
    for pid, role in expected.items():
        assert tl.role_at(pid, 1, 1.0) == MIRROR_ROLE[role], pid


def test_assignment_is_deterministic():
    seq, _ = _parked_sequence("3-5-2")
    a = assign_roles(seq, "home")
    b = assign_roles(seq, "home")
    assert a.intervals == b.intervals


def test_role_change_across_windows():
    # two 2 s windows; the wide midfielders swap flanks in the second
    n = 40
    slots = FORMATIONS["4-4-2"]
    tracks = {"H01": still((-50.0, 0.0), n), "A01": still((50.0, 0.0), n), "A02": still((30.0, 0.0), n)}
    for k, (role, (x, y)) in enumerate(sorted(slots.items())):
        pid = f"H{k + 2:02d}"
        pos = still((x - 20.0, y), n)
        tracks[pid] = pos
    lm = next(f"H{k + 2:02d}" for k, (r, _) in enumerate(sorted(slots.items())) if r == "LM")
    rm = next(f"H{k + 2:02d}" for k, (r, _) in enumerate(sorted(slots.items())) if r == "RM")
    tracks[lm][20:] = tracks[rm][0]
    tracks[rm][20:] = (slots["LM"][0] - 20.0, slots["LM"][1])
    seq = make_sequence(tracks, ball=still((0, 0), n))
    cfg = DEFAULT_CONFIG.with_overrides(role_window_s=2.0)
    tl = assign_roles(seq, "home", cfg)
    assert tl.role_at(lm, 1, 1.0) == "LM"
    assert tl.role_at(lm, 1, 3.0) == "RM"
    assert tl.role_at(rm, 1, 1.0) == "RM"
    assert tl.role_at(rm, 1, 3.0) == "LM"


def test_thin_window_is_filled_from_neighbor():
    # second window loses four defenders: fewer than ten seen -> inherit
    n = 40
    slots = FORMATIONS["4-4-2"]
    tracks = {"H01": still((-50.0, 0.0), n), "A01": still((50.0, 0.0), n), "A02": still((30.0, 0.0), n)}
    expected = {}
    for k, (role, (x, y)) in enumerate(sorted(slots.items())):
        pid = f"H{k + 2:02d}"
        tracks[pid] = still((x - 20.0, y), n)
        expected[pid] = role
    for pid in list(expected)[:4]:
        tracks[pid][20:] = np.nan
    seq = make_sequence(tracks, ball=still((0, 0), n))
    cfg = DEFAULT_CONFIG.with_overrides(role_window_s=2.0)
    tl = assign_roles(seq, "home", cfg)
    for pid, role in expected.items():
        assert tl.role_at(pid, 1, 0.5) == role
        assert tl.role_at(pid, 1, 3.5) == role, f"{pid} not carried into thin window"


def test_five_player_assignment_matches_exhaustive_search():
    # against brute force over every formation and every 5-of-10 slot injection
    n = 10
    spots = [(-10.0, 12.0), (-11.0, -3.0), (0.0, 4.0), (8.0, -14.0), (14.0, 1.0)]
    tracks = {"H01": still((-50.0, 0.0), n), "A01": still((50.0, 0.0), n), "A02": still((30.0, 0.0), n)}
    pids = [f"H{k + 2:02d}" for k in range(5)]
    for pid, spot in zip(pids, spots):
        tracks[pid] = still(spot, n)
    seq = make_sequence(tracks, ball=still((0, 0), n))
    tl = assign_roles(seq, "home")

    def norm(pts):
        pts = np.asarray(pts, dtype=float)
        c = pts - pts.mean(axis=0)
        s = np.sqrt((c**2).sum(axis=1).mean())
        return c / (s or 1.0)

    obs = norm(spots)
    best = None
    for name in sorted(FORMATIONS):
        roles = list(FORMATIONS[name])
        tmpl = norm([FORMATIONS[name][r] for r in roles])
        for combo in permutations(range(10), 5):
            cost = sum(((obs[i] - tmpl[j]) ** 2).sum() for i, j in enumerate(combo))
            if best is None or cost < best[0] - 1e-12:
                best = (cost, {pids[i]: roles[j] for i, j in enumerate(combo)})
    for pid, role in best[1].items():
        assert tl.role_at(pid, 1, 0.5) == role
