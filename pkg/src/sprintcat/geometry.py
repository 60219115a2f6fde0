"""Pitch geometry: neighbor graphs, passing lines, team lines and zones.

Directional quantities (offside line, defensive line, zones) are expressed
in a normalized view where the team of interest attacks toward +x; purely
metric quantities (distances, angles) are view-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial import Delaunay as _SciPyDelaunay
from scipy.spatial import QhullError

from .tracking import Frame, NormalizedView, Pitch

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
DUPLICATE_JITTER_M = 1e-3


# -- primitive predicates ----------------------------------------------------


def point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def segments_intersect(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> bool:
    """True when segment ab meets segment cd (touching counts)."""

    def orient(p, q, r) -> float:
        return float((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))

    def on_segment(p, q, r) -> bool:
        return (
            min(p[0], q[0]) - 1e-12 <= r[0] <= max(p[0], q[0]) + 1e-12
            and min(p[1], q[1]) - 1e-12 <= r[1] <= max(p[1], q[1]) + 1e-12
        )

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)) and o1 != 0 and o2 != 0 and o3 != 0 and o4 != 0:
        return True
    if o1 == 0 and on_segment(a, b, c):
        return True
    if o2 == 0 and on_segment(a, b, d):
        return True
    if o3 == 0 and on_segment(c, d, a):
        return True
    if o4 == 0 and on_segment(c, d, b):
        return True
    return False


def segment_segment_distance(
    a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray
) -> float:
    if segments_intersect(a, b, c, d):
        return 0.0
    return min(
        point_segment_distance(a, c, d),
        point_segment_distance(b, c, d),
        point_segment_distance(c, a, b),
        point_segment_distance(d, a, b),
    )


def crossing_angle_deg(u: np.ndarray, v: np.ndarray) -> float:
    """Acute angle between two directions, in degrees."""
    nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    cos = abs(float(u @ v)) / (nu * nv)
    return math.degrees(math.acos(min(1.0, cos)))


def point_in_triangle(p: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> bool:
    """Inclusive containment: points on the boundary count as inside."""
    d1 = (p[0] - b[0]) * (a[1] - b[1]) - (a[0] - b[0]) * (p[1] - b[1])
    d2 = (p[0] - c[0]) * (b[1] - c[1]) - (b[0] - c[0]) * (p[1] - c[1])
    d3 = (p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])
    has_neg = (d1 < 0) or (d2 < 0) or (d3 < 0)
    has_pos = (d1 > 0) or (d2 > 0) or (d3 > 0)
    return not (has_neg and has_pos)


def ray_intersects_rect(
    origin: np.ndarray, direction: np.ndarray, rect: "Rect"
) -> bool:
    """Slab test: does the ray from ``origin`` along ``direction`` hit the box?"""
    if rect.contains(origin):
        return True
    t_lo, t_hi = 0.0, math.inf
    for axis, (lo, hi) in enumerate(((rect.x0, rect.x1), (rect.y0, rect.y1))):
        o, d = float(origin[axis]), float(direction[axis])
        if abs(d) < 1e-12:
            if o < lo or o > hi:
                return False
            continue
        t1, t2 = (lo - o) / d, (hi - o) / d
        if t1 > t2:
            t1, t2 = t2, t1
        t_lo, t_hi = max(t_lo, t1), min(t_hi, t2)
        if t_lo > t_hi:
            return False
    return t_hi >= 0.0


def _points_segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point (n,2) to segment ab."""
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.linalg.norm(points - a, axis=1)
    t = np.clip((points - a) @ ab / denom, 0.0, 1.0)
    return np.linalg.norm(points - (a + t[:, None] * ab), axis=1)


def _point_segments_distance(p: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Distance from point p to each segment (starts[i], ends[i])."""
    d = ends - starts
    denom = np.einsum("ij,ij->i", d, d)
    safe = np.where(denom == 0.0, 1.0, denom)
    t = np.clip(np.einsum("ij,ij->i", p - starts, d) / safe, 0.0, 1.0)
    t = np.where(denom == 0.0, 0.0, t)
    return np.linalg.norm(p - (starts + t[:, None] * d), axis=1)


def _any_intersects(starts: np.ndarray, ends: np.ndarray, a: np.ndarray, b: np.ndarray) -> bool:
    """True when any segment (starts[i], ends[i]) meets ab (touching counts)."""

    def cross(ox, oy, px, py, qx, qy):
        return (px - ox) * (qy - oy) - (py - oy) * (qx - ox)

    o1 = cross(starts[:, 0], starts[:, 1], ends[:, 0], ends[:, 1], a[0], a[1])
    o2 = cross(starts[:, 0], starts[:, 1], ends[:, 0], ends[:, 1], b[0], b[1])
    o3 = cross(a[0], a[1], b[0], b[1], starts[:, 0], starts[:, 1])
    o4 = cross(a[0], a[1], b[0], b[1], ends[:, 0], ends[:, 1])
    proper = (
        ((o1 > 0) != (o2 > 0))
        & ((o3 > 0) != (o4 > 0))
        & (o1 != 0) & (o2 != 0) & (o3 != 0) & (o4 != 0)
    )
    if np.any(proper):
        return True

    def boxed(px, py, qx, qy, rx, ry):
        return (
            (np.minimum(px, qx) - 1e-12 <= rx) & (rx <= np.maximum(px, qx) + 1e-12)
            & (np.minimum(py, qy) - 1e-12 <= ry) & (ry <= np.maximum(py, qy) + 1e-12)
        )

    touch = (
        ((o1 == 0) & boxed(starts[:, 0], starts[:, 1], ends[:, 0], ends[:, 1], a[0], a[1]))
        | ((o2 == 0) & boxed(starts[:, 0], starts[:, 1], ends[:, 0], ends[:, 1], b[0], b[1]))
        | ((o3 == 0) & boxed(a[0], a[1], b[0], b[1], starts[:, 0], starts[:, 1]))
        | ((o4 == 0) & boxed(a[0], a[1], b[0], b[1], ends[:, 0], ends[:, 1]))
    )
    return bool(np.any(touch))


def polyline_segment_distance(path: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Minimum distance between a polyline (n,2) and segment ab."""
    path = np.asarray(path, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(path) == 1:
        return point_segment_distance(path[0], a, b)
    starts, ends = path[:-1], path[1:]
    if _any_intersects(starts, ends, a, b):
        return 0.0
    return float(
        min(
            _points_segment_distance(path, a, b).min(),
            _point_segments_distance(a, starts, ends).min(),
            _point_segments_distance(b, starts, ends).min(),
        )
    )


def closest_point_on_polyline(path: np.ndarray, p: np.ndarray) -> np.ndarray:
    if len(path) == 1:
        return path[0]
    best, best_d = path[0], math.inf
    for i in range(len(path) - 1):
        a, b = path[i], path[i + 1]
        ab = b - a
        denom = float(ab @ ab)
        t = 0.0 if denom == 0.0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
        q = a + t * ab
        d = float(np.linalg.norm(p - q))
        if d < best_d:
            best, best_d = q, d
    return best


# -- Delaunay neighbor graph ---------------------------------------------------


def delaunay_neighbors(points: Sequence[Sequence[float]]) -> set[tuple[int, int]]:
    """Index pairs (i < j) adjacent in the Delaunay triangulation.

    Fewer than three points, or collinear points, degrade to a chain of
    consecutive neighbors along the line. Exact duplicates are nudged apart
    by a deterministic millimeter jitter keyed to the point index. When four
    points are cocircular the diagonal is the lexicographically smallest
    index pair.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("at least two 2-d points required")
    pts = _separate_duplicates(pts)
    if len(pts) == 2 or _collinear(pts):
        return _chain_neighbors(pts)
    try:
        tri = _SciPyDelaunay(pts)
    except QhullError:
        return _chain_neighbors(pts)
    edges: set[tuple[int, int]] = set()
    for simplex in tri.simplices:
        for i in range(3):
            a, b = int(simplex[i]), int(simplex[(i + 1) % 3])
            edges.add((min(a, b), max(a, b)))
    return _canonicalize_cocircular(pts, edges, tri)


def _separate_duplicates(pts: np.ndarray) -> np.ndarray:
    seen: dict[tuple[float, float], int] = {}
    out = pts.copy()
    for i, p in enumerate(pts):
        key = (float(p[0]), float(p[1]))
        if key in seen:
            angle = GOLDEN_ANGLE * i
            out[i] = p + DUPLICATE_JITTER_M * np.array([math.cos(angle), math.sin(angle)])
        else:
            seen[key] = i
    return out


def _collinear(pts: np.ndarray) -> bool:
    centered = pts - pts.mean(axis=0)
    scale = float(np.abs(centered).max()) or 1.0
    a = centered[1] - centered[0]
    for p in centered[2:]:
        cross = a[0] * (p[1] - centered[0][1]) - a[1] * (p[0] - centered[0][0])
        if abs(cross) > 1e-9 * scale * scale:
            return False
    return True


def _chain_neighbors(pts: np.ndarray) -> set[tuple[int, int]]:
    direction = pts[np.argmax(np.linalg.norm(pts - pts[0], axis=1))] - pts[0]
    if not np.any(direction):
        direction = np.array([1.0, 0.0])
    order = np.argsort(pts @ direction, kind="stable")
    return {
        (min(int(a), int(b)), max(int(a), int(b)))
        for a, b in zip(order, order[1:])
    }


def _incircle(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> float:
    """Positive when d is inside the circumcircle of ccw triangle abc."""
    m = np.array(
        [
            [a[0] - d[0], a[1] - d[1], (a[0] - d[0]) ** 2 + (a[1] - d[1]) ** 2],
            [b[0] - d[0], b[1] - d[1], (b[0] - d[0]) ** 2 + (b[1] - d[1]) ** 2],
            [c[0] - d[0], c[1] - d[1], (c[0] - d[0]) ** 2 + (c[1] - d[1]) ** 2],
        ]
    )
    orient = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    det = float(np.linalg.det(m))
    return det if orient > 0 else -det


def _canonicalize_cocircular(
    pts: np.ndarray, edges: set[tuple[int, int]], tri: _SciPyDelaunay
) -> set[tuple[int, int]]:
    # For every interior edge whose surrounding quad is (near-)cocircular the
    # triangulation is ambiguous; fix the diagonal to the lexicographically
    # smallest index pair so ties resolve deterministically.
    scale = float(np.ptp(pts)) or 1.0
    tol = 1e-9 * scale**4
    opposite: dict[tuple[int, int], list[int]] = {}
    for simplex in tri.simplices:
        s = [int(v) for v in simplex]
        for i in range(3):
            edge = (min(s[i], s[(i + 1) % 3]), max(s[i], s[(i + 1) % 3]))
            opposite.setdefault(edge, []).append(s[(i + 2) % 3])
    for edge, others in opposite.items():
        if len(others) != 2:
            continue
        i, j = edge
        k, l = others
        if abs(_incircle(pts[i], pts[j], pts[k], pts[l])) > tol:
            continue
        alt = (min(k, l), max(k, l))
        if alt < edge and _flippable(pts, edge, alt):
            edges.discard(edge)
            edges.add(alt)
    return edges


def _flippable(pts: np.ndarray, edge: tuple[int, int], alt: tuple[int, int]) -> bool:
    return segments_intersect(pts[edge[0]], pts[edge[1]], pts[alt[0]], pts[alt[1]])


# -- passing lines -------------------------------------------------------------


@dataclass(frozen=True)
class PassingLines:
    """Segments along which the ball may travel; kind is actual or potential."""

    kind: str
    segments: tuple[tuple[np.ndarray, np.ndarray], ...]


def potential_passing_lines(
    team_positions: Mapping[str, np.ndarray], possessor: str
) -> PassingLines:
    """Segments from the possessor to its Delaunay neighbors among teammates."""
    if possessor not in team_positions:
        raise KeyError(f"possessor {possessor!r} not among the given players")
    ids = sorted(team_positions)
    pts = np.array([team_positions[pid] for pid in ids])
    if len(ids) < 2:
        return PassingLines(kind="potential", segments=())
    src = ids.index(possessor)
    segments = []
    for i, j in sorted(delaunay_neighbors(pts)):
        if src == i or src == j:
            other = j if src == i else i
            segments.append((pts[src].copy(), pts[other].copy()))
    return PassingLines(kind="potential", segments=tuple(segments))


# -- goal side ------------------------------------------------------------------


@dataclass(frozen=True)
class GoalSide:
    """Triangle between a player and both posts of the goal they attack."""

    polygon: tuple[np.ndarray, np.ndarray, np.ndarray]
    open: bool


def goal_side(
    player: np.ndarray,
    opponents: Sequence[tuple[np.ndarray, bool]],
    pitch: Pitch,
) -> GoalSide:
    """Goal-side triangle in a +x-attacking view.

    ``opponents`` are (position, is_goalkeeper) pairs; the side is open when
    no outfield opponent lies inside the triangle (boundary counts as in).
    """
    left_post = np.array([pitch.length / 2, pitch.goal_half_width])
    right_post = np.array([pitch.length / 2, -pitch.goal_half_width])
    player = np.asarray(player, dtype=float)
    open_ = True
    for pos, is_gk in opponents:
        if is_gk:
            continue
        if point_in_triangle(np.asarray(pos, dtype=float), player, left_post, right_post):
            open_ = False
            break
    return GoalSide(polygon=(player, left_post, right_post), open=open_)


# -- team lines -----------------------------------------------------------------


def offside_line(frame: Frame, team: str, view: NormalizedView) -> float:
    """x of the second-rearmost player of ``team`` (keeper included), in view coords."""
    xs = sorted(
        float(pos[0]) for pos in view.team_players(frame, team).values()
    )
    if len(xs) < 2:
        raise ValueError(f"team {team} has fewer than two players in frame")
    if team == view.team:
        return xs[1]
    return xs[-2]


def defensive_line(back_line: Mapping[str, np.ndarray], pitch: Pitch) -> np.ndarray:
    """Polyline through the back-line players, extended to both sidelines.

    ``back_line`` maps the team's momentary back-line players to positions in
    view coordinates. The polyline is ordered by y and capped by the feet of
    the perpendiculars from the outermost players to the sidelines.
    """
    if not back_line:
        raise ValueError("no back-line players")
    pts = sorted((float(p[1]), float(p[0])) for p in back_line.values())
    half_w = pitch.width / 2
    vertices = [(pts[0][1], -half_w)]
    vertices.extend((x, y) for y, x in pts)
    vertices.append((pts[-1][1], half_w))
    return np.asarray(vertices, dtype=float)


def polyline_x_at_y(polyline: np.ndarray, y: float) -> float:
    """Interpolate the x of a y-monotone polyline at ``y`` (clamped)."""
    ys = polyline[:, 1]
    if y <= ys[0]:
        return float(polyline[0, 0])
    if y >= ys[-1]:
        return float(polyline[-1, 0])
    k = int(np.searchsorted(ys, y, side="right")) - 1
    y0, y1 = ys[k], ys[k + 1]
    if y1 == y0:
        return float(polyline[k, 0])
    w = (y - y0) / (y1 - y0)
    return float(polyline[k, 0] + w * (polyline[k + 1, 0] - polyline[k, 0]))


def behind_line(point: np.ndarray, polyline: np.ndarray) -> bool:
    """Is the point beyond the line, i.e. at larger x than the line at its y?"""
    return float(point[0]) > polyline_x_at_y(polyline, float(point[1]))


def defensive_area(
    back_line: Mapping[str, np.ndarray],
    defending_end: float,
    pitch: Pitch,
    margin_m: float = 20.0,
) -> tuple[float, float]:
    """Band of x between a team's end line and its back line plus a margin.

    ``defending_end`` is -1 when the team defends the -x end of the view and
    +1 otherwise. Returns (x_low, x_high) with x_low < x_high.
    """
    if not back_line:
        raise ValueError("no back-line players")
    half_l = pitch.length / 2
    end_x = -half_l if defending_end < 0 else half_l
    depth = float(np.mean([abs(float(p[0]) - end_x) for p in back_line.values()]))
    if defending_end < 0:
        return (-half_l, -half_l + depth + margin_m)
    return (half_l - depth - margin_m, half_l)


def returns_to_defense(
    times: np.ndarray, xs: np.ndarray, threshold_kmh: float = 0.5
) -> bool:
    """Net movement toward the own (-x) end faster than ``threshold_kmh``.

    ``xs`` are x coordinates in the normalized view of the moving team.
    """
    duration = float(times[-1] - times[0])
    if duration <= 0:
        return False
    rate = (float(xs[0]) - float(xs[-1])) / duration * 3.6
    return rate > threshold_kmh


# -- zones ----------------------------------------------------------------------


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    def contains(self, p: np.ndarray) -> bool:
        return self.x0 <= float(p[0]) <= self.x1 and self.y0 <= float(p[1]) <= self.y1


@dataclass(frozen=True)
class Zones:
    """Named pitch regions in a +x-attacking view."""

    scoring_zone: Rect
    opponents_penalty_box: Rect
    own_penalty_box: Rect
    flank_half_width: float
    goal_half_width: float
    half_width: float

    def in_scoring_zone(self, p: np.ndarray) -> bool:
        return self.scoring_zone.contains(p)

    def in_flank(self, p: np.ndarray) -> bool:
        return abs(float(p[1])) > self.flank_half_width

    def in_half_space(self, p: np.ndarray) -> bool:
        return self.goal_half_width < abs(float(p[1])) <= self.flank_half_width

    def in_opponents_box(self, p: np.ndarray) -> bool:
        return self.opponents_penalty_box.contains(p)

    def in_own_box(self, p: np.ndarray) -> bool:
        return self.own_penalty_box.contains(p)


def zones(pitch: Pitch, scoring_zone_depth_m: float = 25.0) -> Zones:
    half_l, half_w = pitch.length / 2, pitch.width / 2
    pb = pitch.penalty_box_half_width
    return Zones(
        scoring_zone=Rect(half_l - scoring_zone_depth_m, half_l, -pb, pb),
        opponents_penalty_box=Rect(half_l - pitch.penalty_box_depth, half_l, -pb, pb),
        own_penalty_box=Rect(-half_l, -half_l + pitch.penalty_box_depth, -pb, pb),
        flank_half_width=pb,
        goal_half_width=pitch.goal_half_width,
        half_width=half_w,
    )


def heads_for(origin: np.ndarray, velocity: np.ndarray, rect: Rect) -> bool:
    """Endpoint inside the region, or velocity ray pointed into it."""
    if rect.contains(origin):
        return True
    if float(np.linalg.norm(velocity)) < 1e-9:
        return False
    return ray_intersects_rect(origin, velocity, rect)
