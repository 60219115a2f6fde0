"""Demand tables: classified sprints rolled up by team, role, and category.

A sprint is attributed to the role its runner held at the sprint's start;
sprints whose runner has no role there land in the "UNKNOWN" bucket. Tables
are pure folds, so partial tables built from split inputs merge associatively.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .detection import Sprint
from .roles import RoleTimeline
from .rules import CATEGORIES, Classification
from .tracking import ParseError, TrackingSequence

UNKNOWN_ROLE = "UNKNOWN"


@dataclass
class Cell:
    """Totals for one (team, role, category) bucket."""

    count: int = 0
    total_distance: float = 0.0
    total_duration: float = 0.0
    sum_peak_speed: float = 0.0

    @property
    def mean_peak_speed(self) -> float:
        return self.sum_peak_speed / self.count if self.count else 0.0

    def add(self, sprint: Sprint) -> None:
        self.count += 1
        self.total_distance += sprint.distance
        self.total_duration += sprint.duration
        self.sum_peak_speed += sprint.peak_speed

    def merged(self, other: "Cell") -> "Cell":
        return Cell(
            count=self.count + other.count,
            total_distance=self.total_distance + other.total_distance,
            total_duration=self.total_duration + other.total_duration,
            sum_peak_speed=self.sum_peak_speed + other.sum_peak_speed,
        )


@dataclass
class DemandTable:
    """Sprint demand per (team, role, category)."""

    cells: dict[tuple[str, str, str], Cell] = field(default_factory=dict)

    def cell(self, team: str, role: str, category: str) -> Cell:
        return self.cells.get((team, role, category), Cell())

    def teams(self) -> tuple[str, ...]:
        return tuple(sorted({team for team, _, _ in self.cells}))

    def roles(self, team: str) -> tuple[str, ...]:
        return tuple(sorted({r for t, r, _ in self.cells if t == team}))

    def team_count(self, team: str) -> int:
        return sum(c.count for (t, _, _), c in self.cells.items() if t == team)

    def merged(self, other: "DemandTable") -> "DemandTable":
        cells = {k: Cell(v.count, v.total_distance, v.total_duration, v.sum_peak_speed)
                 for k, v in self.cells.items()}
        for key, cell in other.cells.items():
            cells[key] = cells[key].merged(cell) if key in cells else Cell(
                cell.count, cell.total_distance, cell.total_duration, cell.sum_peak_speed
            )
        return DemandTable(cells)


def aggregate(
    classified: list[tuple[Sprint, Classification]],
    roles: RoleTimeline | None,
    seq: TrackingSequence | None = None,
) -> DemandTable:
    """Fold classified sprints into a demand table.

    The team comes from the sequence roster when given, else from the role
    timeline; the role is the one held at the sprint's start time. Inputs are
    folded in a canonical order, so the result is independent of list order
    down to the last bit.
    """
    table = DemandTable()
    ordered = sorted(
        classified,
        key=lambda pair: (pair[0].period, pair[0].start_time, pair[0].player_id),
    )
    for sprint, cls in ordered:
        role = None
        if roles is not None:
            role = roles.role_at(sprint.player_id, sprint.period, sprint.start_time)
        if seq is not None:
            team = seq.team_of(sprint.player_id)
        elif roles is not None and roles.team_of(sprint.player_id):
            team = roles.team_of(sprint.player_id)
        else:
            team = UNKNOWN_ROLE
        key = (team, role or UNKNOWN_ROLE, cls.category)
        table.cells.setdefault(key, Cell()).add(sprint)
    return table


# -- comparison -------------------------------------------------------------------


@dataclass(frozen=True)
class TableComparison:
    """Count differences per cell and per-role total-variation distances."""

    count_diffs: dict[tuple[str, str, str], int]
    tv_by_role: dict[tuple[str, str], float]

    @property
    def max_tv(self) -> float:
        return max(self.tv_by_role.values(), default=0.0)


def compare_tables(a: DemandTable, b: DemandTable) -> TableComparison:
    """Per-cell count deltas plus, per (team, role), the total-variation
    distance between the two normalized category distributions.

    A role present on only one side counts as fully divergent (distance 1).
    """
    if a.teams() and b.teams() and a.teams() != b.teams():
        raise ValueError(f"team axes differ: {a.teams()} vs {b.teams()}")
    keys = set(a.cells) | set(b.cells)
    diffs = {k: abs(a.cell(*k).count - b.cell(*k).count) for k in sorted(keys)}
    pairs = {(t, r) for t, r, _ in keys}
    tv: dict[tuple[str, str], float] = {}
    for team, role in sorted(pairs):
        na = sum(a.cell(team, role, c).count for c in CATEGORIES)
        nb = sum(b.cell(team, role, c).count for c in CATEGORIES)
        if na == 0 and nb == 0:
            tv[(team, role)] = 0.0
        elif na == 0 or nb == 0:
            tv[(team, role)] = 1.0
        else:
            tv[(team, role)] = 0.5 * sum(
                abs(a.cell(team, role, c).count / na - b.cell(team, role, c).count / nb)
                for c in CATEGORIES
            )
    return TableComparison(count_diffs=diffs, tv_by_role=tv)


# -- export ------------------------------------------------------------------------

_TABLE_COLUMNS = [
    "team_id", "role_code", "category",
    "count", "total_distance_m", "total_duration_s", "mean_peak_speed_kmh",
]

_LONG_COLUMNS = ["team_id", "role_code", "category", "metric", "value"]


def table_rows(table: DemandTable) -> list[dict]:
    rows = []
    for (team, role, category) in sorted(table.cells):
        c = table.cells[(team, role, category)]
        rows.append(
            {
                "team_id": team,
                "role_code": role,
                "category": category,
                "count": c.count,
                "total_distance_m": round(c.total_distance, 2),
                "total_duration_s": round(c.total_duration, 3),
                "mean_peak_speed_kmh": round(c.mean_peak_speed, 2),
            }
        )
    return rows


def save_table(table: DemandTable, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_TABLE_COLUMNS)
        writer.writeheader()
        writer.writerows(table_rows(table))


def load_table(path: str | Path) -> DemandTable:
    path = Path(path)
    table = DemandTable()
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != _TABLE_COLUMNS:
            raise ParseError(f"{path}:1: expected columns {','.join(_TABLE_COLUMNS)}")
        for i, row in enumerate(reader, start=2):
            try:
                count = int(row["count"])
                cell = Cell(
                    count=count,
                    total_distance=float(row["total_distance_m"]),
                    total_duration=float(row["total_duration_s"]),
                    sum_peak_speed=float(row["mean_peak_speed_kmh"]) * count,
                )
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{path}:{i}: {exc}") from None
            key = (row["team_id"], row["role_code"], row["category"])
            table.cells[key] = cell
    return table


def long_rows(table: DemandTable) -> list[dict]:
    """Plot-ready long format: one (team, role, category, metric, value) per row."""
    rows = []
    for short in table_rows(table):
        for metric in ("count", "total_distance_m", "total_duration_s", "mean_peak_speed_kmh"):
            rows.append(
                {
                    "team_id": short["team_id"],
                    "role_code": short["role_code"],
                    "category": short["category"],
                    "metric": metric,
                    "value": short[metric],
                }
            )
    return rows


def save_long(table: DemandTable, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_LONG_COLUMNS)
        writer.writeheader()
        writer.writerows(long_rows(table))
