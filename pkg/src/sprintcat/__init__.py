"""Sprint detection and tactical sprint categorization for soccer tracking data.

The pipeline runs in stages, each usable on its own:

- :mod:`sprintcat.tracking` — positional data model and file formats
- :mod:`sprintcat.detection` — run efforts and sprints from speed signals
- :mod:`sprintcat.geometry` — spatial predicates the category rules share
- :mod:`sprintcat.roles` — playing-role assignment over time windows
- :mod:`sprintcat.rules` — the 15-category classification rule engine
- :mod:`sprintcat.aggregate` — per-role physical/tactical demand tables
- :mod:`sprintcat.plays` — play segmentation, indexing, and retrieval
- :mod:`sprintcat.synth` — scripted scenario generator with ground truth
- :mod:`sprintcat.features` — per-sprint feature tensors for downstream models
- :mod:`sprintcat.cli` — command-line surface composing the stages
"""

from .aggregate import DemandTable, aggregate, compare_tables
from .config import DEFAULT_CONFIG, Config
from .detection import (
    RunEffort,
    Sprint,
    detect_all_sprints,
    detect_player_sprints,
    detect_run_efforts,
    detect_sprints,
)
from .features import FeatureSample, read_feature_file, write_feature_file
from .plays import Play, PlayIndex, build_index, retrieve, segment_plays
from .roles import RoleTimeline, assign_all_roles, load_roles, save_roles
from .rules import (
    CATEGORIES,
    Classification,
    classify,
    classify_match,
    load_classified,
    save_classified,
)
from .synth import Scenario, generate, generate_corpus
from .tracking import (
    Frame,
    ParseError,
    Pitch,
    Roster,
    TrackingSequence,
    load_tracking,
    save_tracking,
)

__version__ = "0.1.0"

__all__ = [
    "CATEGORIES",
    "Classification",
    "Config",
    "DEFAULT_CONFIG",
    "DemandTable",
    "FeatureSample",
    "Frame",
    "ParseError",
    "Pitch",
    "Play",
    "PlayIndex",
    "RoleTimeline",
    "Roster",
    "RunEffort",
    "Scenario",
    "Sprint",
    "TrackingSequence",
    "aggregate",
    "assign_all_roles",
    "build_index",
    "classify",
    "classify_match",
    "compare_tables",
    "detect_all_sprints",
    "detect_player_sprints",
    "detect_run_efforts",
    "detect_sprints",
    "generate",
    "generate_corpus",
    "load_classified",
    "load_roles",
    "load_tracking",
    "read_feature_file",
    "retrieve",
    "save_classified",
    "save_roles",
    "save_tracking",
    "segment_plays",
    "write_feature_file",
    "__version__",
]
