"""Training loop behavior, prediction tables, persistence, command line."""

from __future__ import annotations

import csv
import math

import numpy as np
import pytest
import torch

from sprintnet.cli import main
from sprintnet.data import CATEGORIES, make_batch
from sprintnet.model import ModelConfig, build_model, tensors_from_batch
from sprintnet.train import (
    PREDICTION_COLUMNS,
    evaluate,
    inverse_frequency_weights,
    load_model,
    predict_proba,
    predictions_rows,
    save_model,
    save_predictions,
    train,
)


# -- loss at initialization ------------------------------------------------------------


def test_untrained_loss_sits_at_uniform_entropy(small_samples):
    features, mask, ball, lengths, labels = tensors_from_batch(
        make_batch(small_samples, 64)
    )
    model = build_model(ModelConfig(seed=0))
    with torch.no_grad():
        loss = torch.nn.functional.cross_entropy(
            model.logits(features, mask, ball, lengths), labels
        )
    assert abs(float(loss) - math.log(15)) <= 0.05


# -- training dynamics -------------------------------------------------------------------


def test_loss_decreases_monotonically_over_first_ten_epochs(small_samples):
    _, metrics = train(small_samples, ModelConfig(epochs=10, seed=0))
    assert len(metrics.losses) == 10
    for earlier, later in zip(metrics.losses, metrics.losses[1:]):
        assert later < earlier


def test_ten_sample_overfit_within_500_epochs(small_samples):
    subset = small_samples[:10]
    config = ModelConfig(epochs=500, lr=5e-3, holdout_fraction=0.0, seed=0)
    model, metrics = train(subset, config)
    assert len(metrics.losses) == 500
    assert metrics.holdout_accuracy == []  # nothing was held out
    assert evaluate(model, subset) >= 0.9


def test_metrics_record_holdout_accuracy_per_epoch(small_samples):
    doubled = list(small_samples) * 2  # two per category, so one can be held out
    _, metrics = train(doubled, ModelConfig(epochs=2, seed=0))
    assert len(metrics.holdout_accuracy) == 2
    assert all(0.0 <= a <= 1.0 for a in metrics.holdout_accuracy)
    assert metrics.train_seconds > 0.0


# -- class weights ------------------------------------------------------------------------


def test_inverse_frequency_weights_balance_counts():
    labels = np.array([0, 0, 0, 1, 2, 2], dtype=np.int64)
    weights = inverse_frequency_weights(labels)
    assert weights.shape == (15,)
    np.testing.assert_allclose(weights[0], 6 / (15 * 3))
    np.testing.assert_allclose(weights[1], 6 / (15 * 1))
    np.testing.assert_allclose(weights[2], 6 / (15 * 2))
    assert (weights[3:] == 0).all()


def test_training_with_class_weights_runs(small_samples):
    _, metrics = train(
        small_samples, ModelConfig(epochs=2, class_weights=True, seed=0)
    )
    assert all(math.isfinite(x) for x in metrics.losses)


# -- prediction tables ----------------------------------------------------------------------


def test_probabilities_one_row_per_sample(small_samples):
    model = build_model(ModelConfig(seed=0))
    probs = predict_proba(model, small_samples)
    assert probs.shape == (len(small_samples), 15)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-5)


def test_predictions_table_layout(small_samples, tmp_path):
    model = build_model(ModelConfig(seed=0))
    probs = predict_proba(model, small_samples)
    rows = predictions_rows(small_samples, probs)
    assert list(rows[0]) == list(PREDICTION_COLUMNS)
    assert rows[0]["sprint_id"] == small_samples[0].sample_id

    path = save_predictions(tmp_path / "preds.csv", small_samples, probs)
    with path.open() as fh:
        loaded = list(csv.DictReader(fh))
    assert len(loaded) == len(small_samples)
    for row, sample, prob_row in zip(loaded, small_samples, probs):
        assert row["sprint_id"] == sample.sample_id
        back = np.array([float(row[f"prob_{c}"]) for c in CATEGORIES])
        np.testing.assert_allclose(back, prob_row, atol=1e-6)


def test_predictions_shape_mismatch_rejected(small_samples):
    with pytest.raises(ValueError, match="probabilities must be"):
        predictions_rows(small_samples, np.zeros((3, 15)))


# -- persistence ------------------------------------------------------------------------------


def test_saved_model_restores_identical_predictions(small_samples, tmp_path):
    model = build_model(ModelConfig(seed=1))
    path = save_model(tmp_path / "model.pt", model)
    restored = load_model(path)
    assert restored.config == model.config
    np.testing.assert_array_equal(
        predict_proba(model, small_samples), predict_proba(restored, small_samples)
    )


# -- command line -------------------------------------------------------------------------------


def test_cli_train_then_predict(small_corpus, tmp_path, capsys):
    features = str(small_corpus / "features.bin")
    model_path = tmp_path / "model.pt"
    rc = main(
        ["train", features, "--out", str(model_path), "--epochs", "2", "--seed", "0"]
    )
    assert rc == 0
    assert model_path.exists()
    assert "trained on 15 samples" in capsys.readouterr().err

    preds = tmp_path / "preds.csv"
    rc = main(["predict", features, "--model", str(model_path), "--out", str(preds)])
    assert rc == 0
    with preds.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 15
    assert list(rows[0]) == list(PREDICTION_COLUMNS)


def test_cli_train_writes_holdout_predictions(small_corpus, tmp_path):
    corpus = str(small_corpus / "features.bin")
    preds = tmp_path / "holdout.csv"
    rc = main(
        [
            "train", corpus,
            "--out", str(tmp_path / "m.pt"),
            "--predictions", str(preds),
            "--epochs", "1",
            "--holdout", "0.2",
        ]
    )
    assert rc == 0
    # every category is a singleton here, so the stratified holdout is empty
    with preds.open() as fh:
        assert list(csv.DictReader(fh)) == []


def test_cli_missing_command_exits_2(capsys):
    assert main([]) == 2
    assert "a command is required" in capsys.readouterr().err


def test_cli_unreadable_features_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"not a feature file")
    assert main(["train", str(bad), "--out", str(tmp_path / "m.pt")]) == 2
    assert "not a SPFT feature file" in capsys.readouterr().err
