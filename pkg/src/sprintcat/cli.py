"""Command-line surface composing the pipeline.

Subcommands: detect, classify, aggregate, plays, synth, export-features.
All randomness is seeded via ``--seed``, outputs are deterministic for
identical invocations, and the exit code is 0 exactly when every record was
processed cleanly (per-record failures are written out and reported with
exit code 1; unreadable inputs abort with exit code 2 and a file locus).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from .aggregate import aggregate as build_demand_table
from .aggregate import long_rows, table_rows
from .config import DEFAULT_CONFIG, Config
from .detection import detect_all_sprints, sprint_rows
from .features import samples_from_classifications, write_feature_file
from .plays import build_index, filter_by_keywords, play_rows, retrieve
from .roles import assign_all_roles, load_roles
from .rules import (
    classification_rows,
    classify_match,
    load_classified,
    _jsonable,
)
from .synth import generate_corpus
from .tracking import ParseError, load_tracking

log = logging.getLogger("sprintcat")


# -- output rendering ---------------------------------------------------------------


def _render_table(rows: list[dict]) -> str:
    """CSV text; nested cells (traces) are serialized as JSON strings."""
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                k: json.dumps(_jsonable(v), sort_keys=True)
                if isinstance(v, (dict, list, tuple))
                else v
                for k, v in row.items()
            }
        )
    return buf.getvalue()


def _emit(rows: list[dict], args: argparse.Namespace) -> None:
    if args.format == "json":
        text = json.dumps([_jsonable(r) for r in rows], indent=2) + "\n"
    else:
        text = _render_table(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _count_record_errors(results) -> int:
    return sum(1 for _, cls in results if "_error" in cls.trace)


# -- subcommands ---------------------------------------------------------------------


def cmd_detect(args: argparse.Namespace, config: Config) -> int:
    seq = load_tracking(args.tracking)
    sprints = detect_all_sprints(seq, config)
    _emit(sprint_rows(seq, sprints), args)
    log.info("detected %d sprints", len(sprints))
    return 0


def _classify(args: argparse.Namespace, config: Config):
    seq = load_tracking(args.tracking)
    if args.roles:
        roles = load_roles(args.roles)
    else:
        log.info("no roles file given; computing role assignment from tracking")
        roles = assign_all_roles(seq, config)
    return seq, classify_match(seq, roles=roles, config=config)


def cmd_classify(args: argparse.Namespace, config: Config) -> int:
    seq, results = _classify(args, config)
    _emit(classification_rows(seq, results), args)
    errors = _count_record_errors(results)
    if errors:
        log.warning("%d of %d sprints failed classification", errors, len(results))
        return 1
    log.info("classified %d sprints", len(results))
    return 0


def cmd_aggregate(args: argparse.Namespace, config: Config) -> int:
    classified = load_classified(args.classified)
    roles = load_roles(args.roles) if args.roles else None
    seq = load_tracking(args.tracking) if args.tracking else None
    table = build_demand_table(classified, roles, seq=seq)
    _emit(long_rows(table) if args.long else table_rows(table), args)
    return 1 if _count_record_errors(classified) else 0


def cmd_plays(args: argparse.Namespace, config: Config) -> int:
    seq = load_tracking(args.tracking)
    classified = load_classified(args.classified) if args.classified else None
    index = build_index(seq, classified)
    required = frozenset(k for k in (args.keywords or "").split(",") if k)
    if args.query is None:
        plays = (
            filter_by_keywords(index, required, mode=args.mode)
            if required
            else list(index.plays)
        )
        _emit(play_rows(plays), args)
        log.info("indexed %d plays (%d emitted)", len(index.plays), len(plays))
        return 0
    if not 0 <= args.query < len(index.plays):
        raise ValueError(
            f"query play {args.query} out of range (index holds {len(index.plays)})"
        )
    query = index.plays[args.query]
    ranked = retrieve(
        index, seq, query, k=args.k, required=required, mode=args.mode, config=config
    )
    rows = []
    for rank, (play, distance) in enumerate(ranked, start=1):
        row = {"rank": rank, **play_rows([play])[0], "distance": round(distance, 4)}
        rows.append(row)
    _emit(rows, args)
    return 0


def cmd_synth(args: argparse.Namespace, config: Config) -> int:
    generated = generate_corpus(args.per_category, seed=args.seed, out_dir=args.out)
    log.info(
        "wrote %d scenarios (%d labeled sprints) to %s",
        len(generated),
        sum(len(g.expected) for g in generated),
        args.out,
    )
    return 0


def cmd_export_features(args: argparse.Namespace, config: Config) -> int:
    if args.classified:
        seq = load_tracking(args.tracking)
        results = load_classified(args.classified)
    else:
        log.info("no classified file given; classifying the tracking input")
        seq, results = _classify(args, config)
    samples = samples_from_classifications(seq, results)
    write_feature_file(args.out, samples)
    log.info("wrote %d feature samples to %s", len(samples), args.out)
    return 1 if _count_record_errors(results) else 0


_COMMANDS = {
    "detect": cmd_detect,
    "classify": cmd_classify,
    "aggregate": cmd_aggregate,
    "plays": cmd_plays,
    "synth": cmd_synth,
    "export-features": cmd_export_features,
}


# -- argument parsing ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="key = value config file")
    common.add_argument(
        "--set",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        help="override one config value (repeatable)",
    )
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--out", metavar="PATH", help="output destination")
    common.add_argument(
        "--format", choices=("table", "json"), default="table", help="output format"
    )
    common.add_argument(
        "--print-config",
        action="store_true",
        help="print the effective configuration and exit",
    )

    parser = argparse.ArgumentParser(
        prog="sprintcat",
        description="Sprint detection and tactical categorization for soccer tracking data.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("detect", parents=[common], help="detect sprints in a tracking file")
    p.add_argument("tracking", help="tracking bundle or file")

    p = sub.add_parser(
        "classify", parents=[common], help="detect and categorize sprints"
    )
    p.add_argument("tracking", help="tracking bundle or file")
    p.add_argument("--roles", metavar="FILE", help="role timeline CSV (computed when absent)")

    p = sub.add_parser(
        "aggregate", parents=[common], help="fold classified sprints into a demand table"
    )
    p.add_argument("classified", help="CSV written by the classify command")
    p.add_argument("--roles", metavar="FILE", help="role timeline CSV")
    p.add_argument("--tracking", metavar="FILE", help="tracking input for team lookup")
    p.add_argument("--long", action="store_true", help="emit plot-ready long format")

    p = sub.add_parser(
        "plays", parents=[common], help="segment plays, filter by category, retrieve similar"
    )
    p.add_argument("tracking", help="tracking bundle or file")
    p.add_argument("--classified", metavar="FILE", help="CSV written by the classify command")
    p.add_argument("--query", type=int, metavar="N", help="rank plays against play N")
    p.add_argument("-k", type=int, default=5, help="number of results")
    p.add_argument("--keywords", metavar="CAT,CAT", help="required sprint categories")
    p.add_argument("--mode", choices=("superset", "exact"), default="superset")

    p = sub.add_parser(
        "synth", parents=[common], help="generate a labeled synthetic corpus"
    )
    p.add_argument("--per-category", type=int, default=1, metavar="N")

    p = sub.add_parser(
        "export-features",
        parents=[common],
        help="export per-sprint feature tensors for the deep classifier",
    )
    p.add_argument("tracking", help="tracking bundle or file")
    p.add_argument("--classified", metavar="FILE", help="CSV written by the classify command")
    p.add_argument("--roles", metavar="FILE", help="role timeline CSV (computed when absent)")

    return parser


def _effective_config(args: argparse.Namespace) -> Config:
    config = Config.from_file(args.config) if args.config else DEFAULT_CONFIG
    return config.with_settings(args.set)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    try:
        config = _effective_config(args)
        if args.print_config:
            sys.stdout.write(config.to_text())
            return 0
        if args.command is None:
            parser.print_usage(sys.stderr)
            log.error("a command is required")
            return 2
        if args.command == "synth" and not args.out:
            log.error("synth requires --out DIRECTORY")
            return 2
        if args.command == "export-features" and not args.out:
            log.error("export-features requires --out FILE")
            return 2
        return _COMMANDS[args.command](args, config)
    except ParseError as exc:
        log.error("%s", exc)
        return 2
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
