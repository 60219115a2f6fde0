"""Sprint categorization: phase gating, per-category conditions, priority.

Every sprint is judged in the normalized view of the sprinter's team, so
"forward" always means toward +x and "ahead of the ball" means larger x.
Conditions compare strictly at their thresholds. Each evaluated condition
letter lands in a trace; letters that cannot be evaluated (for example when
no role timeline is available) are recorded as None and never satisfy a row.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import DEFAULT_CONFIG, Config
from .detection import RunEffort, Sprint, detect_all_sprints
from .geometry import (
    behind_line,
    closest_point_on_polyline,
    crossing_angle_deg,
    defensive_area,
    defensive_line,
    goal_side,
    heads_for,
    offside_line,
    polyline_segment_distance,
    potential_passing_lines,
    returns_to_defense,
    segments_intersect,
    zones,
)
from .roles import BACK_LINE_ROLES, SIDE_ROLES, RoleTimeline, assign_all_roles
from .tracking import Frame, NormalizedView, ParseError, TrackingSequence, normalize

CATEGORIES: tuple[str, ...] = (
    "RWB", "EXS", "PEN", "BIB", "SUP", "OVL", "UNL", "MTR",
    "PRS", "COV", "REC", "INT", "CTO",
    "PUP", "OTH",
)

CATEGORY_NAMES = {
    "RWB": "Run with Ball",
    "EXS": "Exploiting Space",
    "PEN": "Penetration",
    "BIB": "Break into Box",
    "SUP": "Support Play",
    "OVL": "Overlapping",
    "UNL": "Underlapping",
    "MTR": "Move to Receive",
    "PRS": "Closing Down / Pressing",
    "COV": "Covering",
    "REC": "Recovery Run",
    "INT": "Interception",
    "CTO": "Chasing the Opponent with Ball",
    "PUP": "Push up Pitch",
    "OTH": "Others",
}

ATTACKING_CATEGORIES: tuple[str, ...] = ("RWB", "EXS", "PEN", "BIB", "SUP", "OVL", "UNL", "MTR")
DEFENDING_CATEGORIES: tuple[str, ...] = ("PRS", "COV", "REC", "INT", "CTO")

# Highest first. Within each phase this refines the published chains
# RWB>BIB>PEN>EXS, RWB>BIB>UNL>OVL>SUP>PUP and CTO>INT>PRS>REC>COV>PUP
# into one total order; MTR slots below the other attacking rows.
PRIORITY: tuple[str, ...] = (
    "RWB", "BIB", "PEN", "UNL", "OVL", "EXS", "SUP", "MTR",
    "CTO", "INT", "PRS", "REC", "COV", "PUP", "OTH",
)

_EPS = 1e-9


@dataclass
class SprintContext:
    """Everything a category predicate may look at for one sprint."""

    sprint: Sprint
    seq: TrackingSequence
    team: str
    view: NormalizedView
    frames: list[Frame]
    roles: RoleTimeline | None
    events: tuple
    possession_share: float
    possession_share_first_half: float
    config: Config = field(default=DEFAULT_CONFIG)

    # cached sprinter path and ball track in view coordinates
    path: np.ndarray = field(init=False)
    ball: np.ndarray = field(init=False)
    times: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        pts, ball, ts = [], [], []
        pid = self.sprint.player_id
        for f in self.frames:
            if pid not in f.players:
                continue
            pts.append(self.view.point(f.players[pid], f.period))
            ball.append(self.view.ball(f))
            ts.append(f.time)
        if len(pts) < 2:
            raise ValueError(f"sprinter {pid} absent over the sprint interval")
        self.path = np.asarray(pts)
        self.ball = np.asarray(ball)
        self.times = np.asarray(ts)

    @property
    def opponent(self) -> str:
        return self.seq.opponent_of(self.team)


@dataclass(frozen=True)
class Classification:
    """Outcome for one sprint: winning category, phase, and the evidence."""

    category: str
    phase: str
    matched: frozenset
    trace: dict


def build_context(
    seq: TrackingSequence,
    sprint: Sprint,
    roles: RoleTimeline | None,
    config: Config = DEFAULT_CONFIG,
) -> SprintContext:
    team = seq.team_of(sprint.player_id)
    frames = seq.frames_in(sprint.period, sprint.start_time, sprint.end_time)
    if not frames:
        raise ValueError("sprint interval covers no frames")
    mid = (sprint.start_time + sprint.end_time) / 2.0
    share = _team_share(frames, team)
    first = [f for f in frames if f.time <= mid + _EPS]
    share_first = _team_share(first, team)
    events = tuple(
        e
        for e in seq.events
        if e.period == sprint.period
        and e.time <= sprint.end_time + max(config.int_margin_s, config.bib_cross_window_s) + _EPS
        and (e.end_time if e.end_time is not None else e.time)
        >= sprint.start_time - config.int_margin_s - _EPS
    )
    return SprintContext(
        sprint=sprint,
        seq=seq,
        team=team,
        view=normalize(seq, team),
        frames=frames,
        roles=roles,
        events=events,
        possession_share=share,
        possession_share_first_half=share_first,
        config=config,
    )


def _team_share(frames: list[Frame], team: str) -> float:
    if not frames:
        return 0.0
    return sum(1 for f in frames if f.possession_team == team) / len(frames)


def phase_of(ctx: SprintContext) -> str:
    threshold = ctx.config.possession_share
    if ctx.possession_share > threshold or ctx.possession_share_first_half > threshold:
        return "attacking"
    opp_full = _team_share(ctx.frames, ctx.opponent)
    mid = (ctx.sprint.start_time + ctx.sprint.end_time) / 2.0
    opp_first = _team_share([f for f in ctx.frames if f.time <= mid + _EPS], ctx.opponent)
    if opp_full > threshold or opp_first > threshold:
        return "defending"
    return "unclassified"


# -- shared helpers -----------------------------------------------------------


def _moves_forward(ctx: SprintContext) -> bool:
    return bool(ctx.path[-1, 0] - ctx.path[0, 0] > ctx.config.forward_net_dx_m)


def _moves_backward(ctx: SprintContext) -> bool:
    return bool(ctx.path[0, 0] - ctx.path[-1, 0] > ctx.config.forward_net_dx_m)


def _possessor_share(ctx: SprintContext, player: str) -> float:
    return sum(1 for f in ctx.frames if f.possessor == player) / len(ctx.frames)


def _end_velocity(ctx: SprintContext) -> np.ndarray:
    t_end = ctx.times[-1]
    mask = ctx.times >= t_end - ctx.config.heads_for_window_s - _EPS
    pts, ts = ctx.path[mask], ctx.times[mask]
    if len(pts) < 2 or ts[-1] <= ts[0]:
        return np.zeros(2)
    return (pts[-1] - pts[0]) / (ts[-1] - ts[0])


def _back_line_positions(ctx: SprintContext, team: str, frame: Frame) -> dict[str, np.ndarray]:
    if ctx.roles is None:
        return {}
    mapping = ctx.roles.players_at(team, frame.period, frame.time)
    sign = ctx.view.sign(frame.period)
    return {
        pid: frame.players[pid] * sign
        for pid, role in mapping.items()
        if role in BACK_LINE_ROLES and pid in frame.players
    }


def _target_opponent(ctx: SprintContext) -> str | None:
    """Closest opponent to the sprinter at the sprint's end."""
    end = ctx.frames[-1]
    me = end.players.get(ctx.sprint.player_id)
    if me is None:
        return None
    best, best_d = None, math.inf
    for pid in sorted(end.players):
        if ctx.seq.team_of(pid) != ctx.opponent:
            continue
        d = float(np.hypot(*(end.players[pid] - me)))
        if d < best_d:
            best, best_d = pid, d
    return best


def _pair_track(ctx: SprintContext, other: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(times, sprinter positions, other positions) where both are present."""
    pid = ctx.sprint.player_id
    ts, mine, theirs = [], [], []
    for f in ctx.frames:
        if pid in f.players and other in f.players:
            sign = ctx.view.sign(f.period)
            ts.append(f.time)
            mine.append(f.players[pid] * sign)
            theirs.append(f.players[other] * sign)
    return np.asarray(ts), np.asarray(mine), np.asarray(theirs)


# -- per-category conditions ---------------------------------------------------
# Each evaluator returns (satisfied, {letter: bool | None}).


def _eval_rwb(ctx: SprintContext):
    a = _possessor_share(ctx, ctx.sprint.player_id) > ctx.config.rwb_possession_share
    return a, {"a": a}


def _eval_exs(ctx: SprintContext):
    a = _moves_forward(ctx)
    b = bool(ctx.path[0, 0] > ctx.ball[0, 0])
    c = bool(ctx.path[-1, 0] - ctx.ball[-1, 0] > ctx.config.exs_ahead_m)
    return a and (b or c), {"a": a, "b": b, "c": c}


def _eval_pen(ctx: SprintContext):
    z = zones(ctx.seq.pitch, ctx.config.scoring_zone_depth_m)
    end_pos = ctx.path[-1]
    a = heads_for(end_pos, _end_velocity(ctx), z.scoring_zone)
    end_frame = ctx.frames[-1]
    back = _back_line_positions(ctx, ctx.opponent, end_frame)
    b = behind_line(end_pos, defensive_line(back, ctx.seq.pitch)) if back else None
    gk = ctx.seq.roster(ctx.opponent).goalkeeper
    opponents = [
        (pos * ctx.view.sign(end_frame.period), pid == gk)
        for pid, pos in end_frame.players.items()
        if ctx.seq.team_of(pid) == ctx.opponent
    ]
    c = goal_side(end_pos, opponents, ctx.seq.pitch).open
    sat = a and b is True and c
    return sat, {"a": a, "b": b, "c": c}


def _eval_bib(ctx: SprintContext):
    z = zones(ctx.seq.pitch, ctx.config.scoring_zone_depth_m)
    a = z.in_opponents_box(ctx.path[-1])
    end_t = ctx.sprint.end_time
    expected = False
    for f in ctx.frames:
        if f.time < end_t - ctx.config.bib_flank_window_s - _EPS:
            continue
        p = f.possessor
        if (
            p is not None
            and p != ctx.sprint.player_id
            and ctx.seq.team_of(p) == ctx.team
            and p in f.players
        ):
            if z.in_flank(ctx.view.point(f.players[p], f.period)):
                expected = True
                break
    occurs = any(
        e.kind == "cross"
        and (e.team is None or e.team == ctx.team)
        and e.period == ctx.sprint.period
        and end_t - _EPS <= e.time <= end_t + ctx.config.bib_cross_window_s + _EPS
        for e in ctx.events
    )
    b = expected or occurs
    return a and b, {"a": a, "b": b}


def _eval_sup(ctx: SprintContext):
    a = _moves_forward(ctx)
    b = bool(ctx.path[0, 0] < ctx.ball[0, 0])
    return a and b, {"a": a, "b": b}


def _eval_flank_run(ctx: SprintContext):
    """Shared (a), (b), (c) of the two flank-passing categories."""
    z = zones(ctx.seq.pitch, ctx.config.scoring_zone_depth_m)
    a = _moves_forward(ctx)
    b = bool(ctx.path[0, 0] < ctx.ball[0, 0])
    c = bool(z.in_flank(ctx.path[-1]) and ctx.path[-1, 0] > ctx.ball[-1, 0])
    return a, b, c


def _eval_ovl(ctx: SprintContext):
    a, b, c = _eval_flank_run(ctx)
    if ctx.roles is None:
        d = None
    else:
        role = ctx.roles.role_at(
            ctx.sprint.player_id, ctx.sprint.period, ctx.sprint.end_time
        )
        d = role in SIDE_ROLES if role is not None else None
    sat = a and b and c and d is True
    return sat, {"a": a, "b": b, "c": c, "d": d}


def _eval_unl(ctx: SprintContext):
    a, b, c = _eval_flank_run(ctx)
    end_frame = ctx.frames[-1]
    p = end_frame.possessor
    d = False
    if (
        p is not None
        and p != ctx.sprint.player_id
        and ctx.seq.team_of(p) == ctx.team
        and p in end_frame.players
    ):
        q = ctx.view.point(end_frame.players[p], end_frame.period)
        side = math.copysign(1.0, ctx.path[-1, 1])
        if math.copysign(1.0, q[1]) == side:
            on_path = closest_point_on_polyline(ctx.path, q)
            d = bool(abs(q[1]) > abs(on_path[1]))
    sat = a and b and c and d
    return sat, {"a": a, "b": b, "c": c, "d": d}


def _eval_mtr(ctx: SprintContext):
    a = _moves_backward(ctx)
    d0 = float(np.linalg.norm(ctx.path[0] - ctx.ball[0]))
    d1 = float(np.linalg.norm(ctx.path[-1] - ctx.ball[-1]))
    b = d1 < d0
    return a and b, {"a": a, "b": b}


def _eval_prs(ctx: SprintContext):
    target = _target_opponent(ctx)
    a = None
    if target is not None:
        ts, mine, theirs = _pair_track(ctx, target)
        if len(ts) >= 2:
            d = np.linalg.norm(mine - theirs, axis=1)
            a = bool(d[-1] < d[0] and d[-1] < ctx.config.prs_end_distance_m)
    b = False
    for f in ctx.frames:
        p = f.possessor
        if p is None or ctx.seq.team_of(p) != ctx.opponent or p not in f.players:
            continue
        team_positions = ctx.view.team_players(f, ctx.opponent)
        if len(team_positions) < 2:
            continue
        lines = potential_passing_lines(team_positions, p)
        for seg_a, seg_b in lines.segments:
            if polyline_segment_distance(ctx.path, seg_a, seg_b) < ctx.config.prs_passline_distance_m:
                b = True
                break
        if b:
            break
    sat = a is True or b
    return sat, {"a": a, "b": b}


def _eval_cov(ctx: SprintContext):
    a = _returns_both(ctx)
    end_frame = ctx.frames[-1]
    back = _back_line_positions(ctx, ctx.team, end_frame)
    if back:
        x_lo, x_hi = defensive_area(
            back, -1.0, ctx.seq.pitch, ctx.config.defensive_area_margin_m
        )
        b = bool(x_lo - _EPS <= ctx.path[-1, 0] <= x_hi + _EPS)
    else:
        b = None
    sat = a and b is True
    return sat, {"a": a, "b": b}


def _returns_both(ctx: SprintContext) -> bool:
    thr = ctx.config.return_speed_kmh
    player = returns_to_defense(ctx.times, ctx.path[:, 0], thr)
    centroids, ts = [], []
    for f in ctx.frames:
        own = ctx.view.team_players(f, ctx.team)
        if own:
            centroids.append(np.mean([p[0] for p in own.values()]))
            ts.append(f.time)
    team = len(ts) >= 2 and returns_to_defense(
        np.asarray(ts), np.asarray(centroids), thr
    )
    return player and team


def _eval_rec(ctx: SprintContext):
    a = _returns_both(ctx)
    gaps = ctx.path[:, 0] - ctx.ball[:, 0]
    b = bool(np.all(gaps > 0))
    c = bool(np.mean(gaps) > ctx.config.rec_mean_gap_m)
    return a and b and c, {"a": a, "b": b, "c": c}


def _eval_int(ctx: SprintContext):
    start, end = ctx.sprint.start_time, ctx.sprint.end_time
    margin = ctx.config.int_margin_s
    any_angle, any_window, joint = False, False, False
    for e in ctx.events:
        if e.kind != "pass" or e.period != ctx.sprint.period:
            continue
        if e.team is not None and e.team != ctx.opponent:
            continue
        if e.start is None or e.end is None or e.end_time is None:
            continue
        in_window = start >= e.time - margin - _EPS and end <= e.end_time + margin + _EPS
        any_window = any_window or in_window
        pa = ctx.view.point(np.asarray(e.start, dtype=float), ctx.sprint.period)
        pb = ctx.view.point(np.asarray(e.end, dtype=float), ctx.sprint.period)
        crosses = False
        for i in range(len(ctx.path) - 1):
            u, v = ctx.path[i], ctx.path[i + 1]
            if not np.any(v != u):  # standing still: no direction to cross at
                continue
            if segments_intersect(u, v, pa, pb):
                angle = crossing_angle_deg(v - u, pb - pa)
                if angle > ctx.config.int_angle_deg:
                    crosses = True
                    break
        any_angle = any_angle or crosses
        if crosses and in_window:
            joint = True
    return joint, {"a": any_angle, "b": any_window}


def _eval_cto(ctx: SprintContext):
    target = _target_opponent(ctx)
    if target is None:
        return False, {"a": None, "b": None, "c": None}
    a = _possessor_share(ctx, target) > ctx.config.cto_possession_share
    ts, mine, theirs = _pair_track(ctx, target)
    if len(ts) >= 2 and ts[-1] > ts[0]:
        dist = float(np.linalg.norm(np.diff(theirs, axis=0), axis=1).sum())
        b = bool(dist / (ts[-1] - ts[0]) * 3.6 > ctx.config.cto_target_speed_kmh)
        c = bool(np.mean(np.linalg.norm(mine - theirs, axis=1)) < ctx.config.cto_target_distance_m)
    else:
        b, c = None, None
    sat = a and b is True and c is True
    return sat, {"a": a, "b": b, "c": c}


def _eval_pup(ctx: SprintContext):
    if ctx.roles is None:
        a = None
    else:
        role = ctx.roles.role_at(
            ctx.sprint.player_id, ctx.sprint.period, ctx.sprint.start_time
        )
        a = role in BACK_LINE_ROLES if role is not None else None
    try:
        rise = offside_line(ctx.frames[-1], ctx.team, ctx.view) - offside_line(
            ctx.frames[0], ctx.team, ctx.view
        )
        b = bool(rise > ctx.config.pup_offside_advance_m)
    except ValueError:
        b = None
    c = bool(
        np.mean(np.linalg.norm(ctx.path - ctx.ball, axis=1)) > ctx.config.pup_ball_distance_m
    )
    sat = a is True and b is True and c
    return sat, {"a": a, "b": b, "c": c}


_EVALUATORS = {
    "RWB": _eval_rwb,
    "EXS": _eval_exs,
    "PEN": _eval_pen,
    "BIB": _eval_bib,
    "SUP": _eval_sup,
    "OVL": _eval_ovl,
    "UNL": _eval_unl,
    "MTR": _eval_mtr,
    "PRS": _eval_prs,
    "COV": _eval_cov,
    "REC": _eval_rec,
    "INT": _eval_int,
    "CTO": _eval_cto,
    "PUP": _eval_pup,
}


def evaluate_category(ctx: SprintContext, code: str):
    """(satisfied, per-letter trace) for one category row."""
    if code not in _EVALUATORS:
        raise KeyError(f"no conditions defined for {code!r}")
    sat, letters = _EVALUATORS[code](ctx)
    return bool(sat), {k: (None if v is None else bool(v)) for k, v in letters.items()}


def resolve_priority(matched) -> str:
    """Highest-priority category among ``matched``; OTH when empty."""
    for code in PRIORITY:
        if code in matched:
            return code
    return "OTH"


def classify(ctx: SprintContext) -> Classification:
    phase = phase_of(ctx)
    if phase == "attacking":
        rows = ATTACKING_CATEGORIES + ("PUP",)
    elif phase == "defending":
        rows = DEFENDING_CATEGORIES + ("PUP",)
    else:
        rows = ("PUP",)
    matched = set()
    trace: dict = {}
    for code in rows:
        sat, letters = evaluate_category(ctx, code)
        trace[code] = letters
        if sat:
            matched.add(code)
    return Classification(
        category=resolve_priority(matched),
        phase=phase,
        matched=frozenset(matched),
        trace=trace,
    )


def classify_match(
    seq: TrackingSequence,
    roles: RoleTimeline | None = None,
    config: Config = DEFAULT_CONFIG,
) -> list[tuple[Sprint, Classification]]:
    """Detect and classify every sprint of the match.

    Per-sprint failures downgrade that sprint to OTH with the error recorded
    in its trace rather than aborting the batch.
    """
    if roles is None:
        roles = assign_all_roles(seq, config)
    results = []
    for sprint in detect_all_sprints(seq, config):
        try:
            ctx = build_context(seq, sprint, roles, config)
            results.append((sprint, classify(ctx)))
        except Exception as exc:  # noqa: BLE001 - per-record error policy
            results.append(
                (
                    sprint,
                    Classification(
                        category="OTH",
                        phase="unclassified",
                        matched=frozenset(),
                        trace={"_error": str(exc)},
                    ),
                )
            )
    return results


def classification_rows(
    seq: TrackingSequence, results: list[tuple[Sprint, Classification]]
) -> list[dict]:
    """Flat export records, one per classified sprint."""
    rows = []
    for sprint, cls in results:
        rows.append(
            {
                "team": seq.team_of(sprint.player_id),
                "player": sprint.player_id,
                "period": sprint.period,
                "start_s": round(sprint.start_time, 3),
                "end_s": round(sprint.end_time, 3),
                "duration_s": round(sprint.duration, 3),
                "peak_time_s": round(sprint.peak_time, 3),
                "peak_speed_kmh": round(sprint.peak_speed, 2),
                "distance_m": round(sprint.distance, 2),
                "mean_speed_kmh": round(sprint.mean_speed, 2),
                "phase": cls.phase,
                "category": cls.category,
                "matched": "|".join(sorted(cls.matched)),
                "trace": cls.trace,
            }
        )
    return rows


_CLASSIFIED_COLUMNS = (
    "team", "player", "period", "start_s", "end_s", "duration_s",
    "peak_time_s", "peak_speed_kmh", "distance_m", "mean_speed_kmh",
    "phase", "category", "matched", "trace",
)


def _jsonable(value):
    """Coerce trace payloads (numpy scalars, arrays, sets) to JSON-safe types."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return [_jsonable(v) for v in sorted(value)]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    return value


def save_classified(
    seq: TrackingSequence,
    results: list[tuple[Sprint, Classification]],
    path: str | Path,
) -> Path:
    """Write classified sprints as CSV; the trace column holds JSON."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CLASSIFIED_COLUMNS)
        writer.writeheader()
        for row in classification_rows(seq, results):
            row = dict(row)
            row["trace"] = json.dumps(_jsonable(row["trace"]), sort_keys=True)
            writer.writerow(row)
    return path


def load_classified(path: str | Path) -> list[tuple[Sprint, Classification]]:
    """Read a CSV written by :func:`save_classified`."""
    path = Path(path)
    results = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(_CLASSIFIED_COLUMNS):
            raise ParseError(
                f"{path}:1: expected columns {','.join(_CLASSIFIED_COLUMNS)}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                effort = RunEffort(
                    player_id=row["player"],
                    period=int(row["period"]),
                    start_time=float(row["start_s"]),
                    end_time=float(row["end_s"]),
                    peak_time=float(row["peak_time_s"]),
                    peak_speed=float(row["peak_speed_kmh"]),
                )
                sprint = Sprint(
                    effort=effort,
                    distance=float(row["distance_m"]),
                    mean_speed=float(row["mean_speed_kmh"]),
                )
                if row["category"] not in CATEGORIES:
                    raise ValueError(f"unknown category {row['category']!r}")
                matched = frozenset(m for m in row["matched"].split("|") if m)
                cls = Classification(
                    category=row["category"],
                    phase=row["phase"],
                    matched=matched,
                    trace=json.loads(row["trace"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            results.append((sprint, cls))
    return results
