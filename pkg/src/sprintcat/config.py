"""Tunable parameters for the sprint analysis pipeline.

All thresholds live in one frozen dataclass so that every stage (detection,
classification, aggregation, retrieval) reads from a single source. Values
can be overridden from a plain ``key = value`` text file or from
``key=value`` strings on the command line.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class Config:
    """Pipeline parameters. Speeds are km/h, distances meters, times seconds."""

    # sampling / smoothing
    sample_rate: float = 10.0
    smoothing_window_s: float = 0.5
    # run-effort segmentation and sprint filter
    tau_kmh: float = 4.0
    sprint_threshold_kmh: float = 21.0
    min_effort_duration_s: float = 0.5
    # possession derivation
    control_radius_m: float = 1.5
    min_control_frames: int = 3
    # phase attribution
    possession_share: float = 0.8
    # category thresholds
    forward_net_dx_m: float = 1.0
    rwb_possession_share: float = 0.4
    exs_ahead_m: float = 3.0
    bib_cross_window_s: float = 2.0
    bib_flank_window_s: float = 1.0
    prs_end_distance_m: float = 5.0
    prs_passline_distance_m: float = 3.0
    rec_mean_gap_m: float = 10.0
    int_angle_deg: float = 30.0
    int_margin_s: float = 2.0
    cto_possession_share: float = 0.4
    cto_target_speed_kmh: float = 15.0
    cto_target_distance_m: float = 4.0
    pup_offside_advance_m: float = 10.0
    pup_ball_distance_m: float = 20.0
    return_speed_kmh: float = 0.5
    defensive_area_margin_m: float = 20.0
    scoring_zone_depth_m: float = 25.0
    heads_for_window_s: float = 0.5
    # role assignment
    role_window_s: float = 300.0
    # play retrieval
    play_resample_samples: int = 16
    retrieval_unmatched_penalty_m: float = 10.0

    def with_settings(self, settings: list[str]) -> "Config":
        """Apply ``key=value`` override strings and return a new Config."""
        updates = {}
        for raw in settings:
            if "=" not in raw:
                raise ValueError(f"invalid setting {raw!r}, expected key=value")
            key, _, value = raw.partition("=")
            updates[key.strip()] = value.strip()
        return self.with_overrides(**updates)

    def with_overrides(self, **kwargs: object) -> "Config":
        fields = {f.name: f for f in dataclasses.fields(self)}
        coerced = {}
        for key, value in kwargs.items():
            if key not in fields:
                raise ValueError(f"unknown config key {key!r}")
            target = fields[key].type
            if isinstance(value, str):
                value = int(value) if target == "int" else float(value)
            coerced[key] = value
        return dataclasses.replace(self, **coerced)

    def to_text(self) -> str:
        lines = [f"{f.name} = {getattr(self, f.name)}" for f in dataclasses.fields(self)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_file(cls, path: str | Path) -> "Config":
        """Read a config from ``key = value`` lines; '#' starts a comment."""
        settings = []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {line!r}")
            settings.append(stripped)
        return cls().with_settings(settings)


DEFAULT_CONFIG = Config()
