"""Deep sprint classifier trained on exported per-sprint feature tensors.

- ``data``: packed feature-file parsing, padding, batching, splits
- ``model``: permutation-invariant set encoder + BiGRU classifier
- ``train``: cross-entropy training loop, metrics, prediction tables
- ``cli``: ``sprintnet train`` / ``sprintnet predict``
"""

from .data import (
    CATEGORIES,
    Batch,
    ParseError,
    SprintSample,
    make_batch,
    pad_or_truncate,
    read_feature_file,
    stratified_split,
)
from .model import ModelConfig, SetEncoder, SprintClassifier, build_model, tensors_from_batch
from .train import (
    PREDICTION_COLUMNS,
    TrainMetrics,
    evaluate,
    inverse_frequency_weights,
    load_model,
    predict_proba,
    predictions_rows,
    save_model,
    save_predictions,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "CATEGORIES",
    "Batch",
    "ModelConfig",
    "ParseError",
    "PREDICTION_COLUMNS",
    "SetEncoder",
    "SprintClassifier",
    "SprintSample",
    "TrainMetrics",
    "build_model",
    "evaluate",
    "inverse_frequency_weights",
    "load_model",
    "make_batch",
    "pad_or_truncate",
    "predict_proba",
    "predictions_rows",
    "read_feature_file",
    "save_model",
    "save_predictions",
    "stratified_split",
    "tensors_from_batch",
    "train",
]
