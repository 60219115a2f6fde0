"""Training, evaluation, and prediction tables for the sprint classifier.

Training minimizes mean cross-entropy over the labeled samples, with an
optional inverse-frequency weighting for imbalanced corpora (off by
default). The train/holdout split is stratified by category and fixed
by the config seed, and metrics record the per-epoch loss alongside the
held-out accuracy. Predictions are written as a CSV of one row per
sprint: its id followed by the 15 category probabilities.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from .data import CATEGORIES, Batch, SprintSample, make_batch, stratified_split
from .model import ModelConfig, SprintClassifier, build_model, tensors_from_batch

log = logging.getLogger("sprintnet")

PREDICTION_COLUMNS = ("sprint_id", *(f"prob_{c}" for c in CATEGORIES))

_EVAL_CHUNK = 256


@dataclass
class TrainMetrics:
    """Per-epoch loss and held-out accuracy, plus the final numbers."""

    losses: list[float] = field(default_factory=list)
    holdout_accuracy: list[float] = field(default_factory=list)
    train_seconds: float = 0.0

    @property
    def final_accuracy(self) -> float:
        return self.holdout_accuracy[-1] if self.holdout_accuracy else float("nan")


def inverse_frequency_weights(labels: np.ndarray) -> torch.Tensor:
    """Per-category weights proportional to N / (K * count); absent
    categories weigh zero so they cannot produce infinite weights."""
    counts = np.bincount(labels, minlength=len(CATEGORIES)).astype(np.float64)
    present = counts > 0
    weights = np.zeros(len(CATEGORIES))
    weights[present] = counts.sum() / (len(CATEGORIES) * counts[present])
    return torch.as_tensor(weights, dtype=torch.float32)


def _epoch_batches(
    n: int, batch_size: int | None, generator: torch.Generator
) -> list[torch.Tensor]:
    if batch_size is None or batch_size >= n:
        return [torch.arange(n)]
    order = torch.randperm(n, generator=generator)
    return list(torch.split(order, batch_size))


def train(
    samples: Sequence[SprintSample], config: ModelConfig
) -> tuple[SprintClassifier, TrainMetrics]:
    """Fit a classifier on the samples; returns the model in eval mode.

    The holdout fraction of each category is split off before training
    (seeded); accuracy on that split is recorded every epoch.
    """
    train_samples, holdout = stratified_split(
        samples, config.holdout_fraction, config.seed
    )
    batch = make_batch(train_samples, config.max_frames)
    features, mask, ball, lengths, labels = tensors_from_batch(batch)
    weights = inverse_frequency_weights(batch.labels) if config.class_weights else None
    criterion = nn.CrossEntropyLoss(weight=weights)

    model = build_model(config)
    generator = torch.Generator().manual_seed(config.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    metrics = TrainMetrics()
    started = time.perf_counter()
    for epoch in range(config.epochs):
        model.train()
        total = 0.0
        for idx in _epoch_batches(len(batch), config.batch_size, generator):
            optimizer.zero_grad()
            logits = model.logits(features[idx], mask[idx], ball[idx], lengths[idx])
            loss = criterion(logits, labels[idx])
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * len(idx)
        metrics.losses.append(total / len(batch))
        if holdout:
            metrics.holdout_accuracy.append(
                evaluate(model, holdout, config.max_frames)
            )
        log.info(
            "epoch %d: loss %.4f%s",
            epoch + 1,
            metrics.losses[-1],
            f", holdout accuracy {metrics.holdout_accuracy[-1]:.3f}" if holdout else "",
        )
    metrics.train_seconds = time.perf_counter() - started
    model.eval()
    return model, metrics


@torch.no_grad()
def predict_proba(
    model: SprintClassifier,
    samples: Sequence[SprintSample],
    max_frames: int | None = None,
) -> np.ndarray:
    """Category probabilities, one row per sample."""
    model.eval()
    if not samples:
        return np.zeros((0, len(CATEGORIES)))
    max_frames = model.config.max_frames if max_frames is None else max_frames
    rows = []
    for start in range(0, len(samples), _EVAL_CHUNK):
        chunk = make_batch(samples[start : start + _EVAL_CHUNK], max_frames)
        features, mask, ball, lengths, _ = tensors_from_batch(chunk)
        rows.append(model(features, mask, ball, lengths).numpy())
    return np.concatenate(rows, axis=0)


def evaluate(
    model: SprintClassifier,
    samples: Sequence[SprintSample],
    max_frames: int | None = None,
) -> float:
    """Fraction of samples whose argmax probability hits the true label."""
    probs = predict_proba(model, samples, max_frames)
    predicted = probs.argmax(axis=1)
    truth = np.asarray([s.label_index for s in samples])
    return float((predicted == truth).mean())


def predictions_rows(
    samples: Sequence[SprintSample], probs: np.ndarray
) -> list[dict]:
    """One row per sprint: id plus the 15 category probabilities."""
    if probs.shape != (len(samples), len(CATEGORIES)):
        raise ValueError(
            f"probabilities must be ({len(samples)}, {len(CATEGORIES)})"
        )
    return [
        {
            "sprint_id": s.sample_id,
            **{f"prob_{c}": f"{p:.6f}" for c, p in zip(CATEGORIES, row)},
        }
        for s, row in zip(samples, probs)
    ]


def save_predictions(
    path: str | Path, samples: Sequence[SprintSample], probs: np.ndarray
) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=PREDICTION_COLUMNS)
        writer.writeheader()
        writer.writerows(predictions_rows(samples, probs))
    return path


def save_model(path: str | Path, model: SprintClassifier) -> Path:
    path = Path(path)
    torch.save({"config": asdict(model.config), "state": model.state_dict()}, path)
    return path


def load_model(path: str | Path) -> SprintClassifier:
    payload = torch.load(Path(path), weights_only=True)
    config = ModelConfig(**payload["config"])
    model = SprintClassifier(config)
    model.load_state_dict(payload["state"])
    model.eval()
    return model
