"""Command line front end: train on a feature file, predict with a model.

Both commands read the packed feature files that ``sprintcat
export-features`` and ``sprintcat synth`` write. ``train`` fits a
classifier, saves it, and optionally writes held-out predictions;
``predict`` scores every sample in a feature file with a saved model.
Exit codes: 0 on success, 2 on unreadable input or bad usage.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .data import ParseError, read_feature_file, stratified_split
from .model import ModelConfig
from .train import (
    evaluate,
    load_model,
    predict_proba,
    save_model,
    save_predictions,
    train,
)

log = logging.getLogger("sprintnet")


def cmd_train(args: argparse.Namespace) -> int:
    samples = read_feature_file(args.features)
    config = ModelConfig(
        lr=args.lr,
        epochs=args.epochs,
        batch_size=args.batch_size,
        holdout_fraction=args.holdout,
        class_weights=args.class_weights,
        seed=args.seed,
    )
    model, metrics = train(samples, config)
    log.info(
        "trained on %d samples in %.1f s; final holdout accuracy %.3f",
        len(samples),
        metrics.train_seconds,
        metrics.final_accuracy,
    )
    save_model(args.out, model)
    if args.predictions:
        _, holdout = stratified_split(samples, config.holdout_fraction, config.seed)
        save_predictions(args.predictions, holdout, predict_proba(model, holdout))
        log.info("wrote %d holdout predictions to %s", len(holdout), args.predictions)
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    samples = read_feature_file(args.features)
    model = load_model(args.model)
    probs = predict_proba(model, samples)
    save_predictions(args.out, samples, probs)
    log.info(
        "wrote %d predictions to %s (accuracy against file labels: %.3f)",
        len(samples),
        args.out,
        evaluate(model, samples),
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sprintnet", description="Train and run the deep sprint classifier."
    )
    sub = parser.add_subparsers(dest="command")

    p_train = sub.add_parser("train", help="fit a classifier on a feature file")
    p_train.add_argument("features", help="packed feature file")
    p_train.add_argument("--out", required=True, help="model file to write")
    p_train.add_argument("--predictions", help="also write held-out predictions CSV")
    p_train.add_argument("--epochs", type=int, default=100)
    p_train.add_argument("--lr", type=float, default=1e-3)
    p_train.add_argument("--batch-size", type=int, default=None)
    p_train.add_argument("--holdout", type=float, default=0.2)
    p_train.add_argument("--class-weights", action="store_true")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.set_defaults(func=cmd_train)

    p_predict = sub.add_parser("predict", help="score a feature file with a model")
    p_predict.add_argument("features", help="packed feature file")
    p_predict.add_argument("--model", required=True, help="saved model file")
    p_predict.add_argument("--out", required=True, help="predictions CSV to write")
    p_predict.set_defaults(func=cmd_predict)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    try:
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            log.error("a command is required")
            return 2
        return args.func(args)
    except (ParseError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
