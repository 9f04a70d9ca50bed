"""Command-line front end: stats, extract, train, evaluate, report.

All artifacts land in --out-dir (or $SENTIGRAM_OUT, or ./runs). Runs are
deterministic given --seed whenever --max-candidates is used instead of a
wall-clock budget; reports embed the full run configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .automl import ensemble_select, ensemble_to_dict, export_leaderboard, fit_final, search
from .corpus import LABEL_TO_INDEX, LABELS, DatasetError, class_distribution, load_dataset
from .evaluation import RunConfig, render_report, run_experiment
from .features import SCHEMES, FeatureMatrix, smote_oversample, vectorize
from .ngrams import build_dictionary, export_dictionary
from .preprocess import load_stoplist, preprocess

ENV_OUT_DIR = "SENTIGRAM_OUT"


def _default_out_dir() -> str:
    return os.environ.get(ENV_OUT_DIR, "runs")


def _add_data_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="dataset CSV with a text,label header")
    p.add_argument("--format", default="csv", choices=["csv"], help="dataset format")


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("feature pipeline")
    g.add_argument("--max-n", type=int, default=10, help="longest phrase length (default 10)")
    g.add_argument(
        "--min-freq", type=int, default=2, help="drop phrases occurring fewer times (default 2)"
    )
    g.add_argument(
        "--scheme", default="count_x_weight", choices=SCHEMES, help="feature value scheme"
    )
    g.add_argument("--no-stopwords", action="store_true", help="skip stop-word removal")
    g.add_argument("--stoplist", default=None, help="custom stop-word file (one word per line)")


def _add_search_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model search")
    g.add_argument("--folds", type=int, default=5, help="internal CV folds (default 5)")
    g.add_argument(
        "--max-candidates",
        type=int,
        default=None,
        help="evaluate exactly this many candidates (fully reproducible mode)",
    )
    g.add_argument(
        "--budget-seconds",
        type=float,
        default=None,
        help="wall-clock search budget; default 60 when --max-candidates is not set",
    )
    g.add_argument("--ensemble-size", type=int, default=10, help="greedy selection steps")
    g.add_argument("--no-smote", action="store_true", help="disable minority oversampling")
    g.add_argument("--smote-k", type=int, default=5, help="SMOTE neighbour count (default 5)")
    g.add_argument("--seed", type=int, default=0, help="master random seed")


def _add_out_dir(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--out-dir",
        default=None,
        help=f"output directory (default ${ENV_OUT_DIR} or ./runs)",
    )


def _out_dir(args) -> Path:
    out = Path(args.out_dir if args.out_dir is not None else _default_out_dir())
    out.mkdir(parents=True, exist_ok=True)
    return out


def _stoplist_from(args):
    return load_stoplist(args.stoplist) if not args.no_stopwords else None


def cmd_stats(args) -> int:
    ds = load_dataset(args.data, fmt=args.format)
    dist = class_distribution(ds)
    print(f"dataset: {ds.name} ({len(ds)} documents)")
    for label in LABELS:
        count = dist[label]
        share = 100.0 * count / len(ds) if len(ds) else 0.0
        print(f"  {label:<9} {count:>7}  {share:5.1f}%")
    return 0


def cmd_extract(args) -> int:
    ds = load_dataset(args.data, fmt=args.format)
    stoplist = _stoplist_from(args)
    tokens = [preprocess(text, stoplist) for text in ds.texts()]
    dictionary = build_dictionary(tokens, max_n=args.max_n, min_freq=args.min_freq)
    out = Path(args.out) if args.out else _out_dir(args) / "dictionary.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    export_dictionary(dictionary, out)
    print(f"wrote {len(dictionary)} phrases to {out}")
    return 0


def cmd_train(args) -> int:
    ds = load_dataset(args.data, fmt=args.format)
    stoplist = _stoplist_from(args)
    tokens = [preprocess(text, stoplist) for text in ds.texts()]
    dictionary = build_dictionary(tokens, max_n=args.max_n, min_freq=args.min_freq)
    fm = FeatureMatrix(
        X=vectorize(tokens, dictionary, args.scheme),
        y=np.asarray([LABEL_TO_INDEX[label] for label in ds.labels()], dtype=np.int64),
        fingerprint=dictionary.fingerprint,
        scheme=args.scheme,
    )
    seed_state = np.random.SeedSequence(args.seed).generate_state(2)
    if not args.no_smote:
        fm = smote_oversample(fm, k=args.smote_k, seed=int(seed_state[0]))
    lb = search(
        fm,
        folds=args.folds,
        seed=int(seed_state[1]),
        max_candidates=args.max_candidates,
        budget_seconds=args.budget_seconds,
    )
    ensemble = fit_final(ensemble_select(lb, size=args.ensemble_size), fm)

    out = _out_dir(args)
    export_dictionary(dictionary, out / "dictionary.tsv")
    export_leaderboard(lb, out / "leaderboard.tsv")
    payload = ensemble_to_dict(ensemble)
    payload["run_config"] = _config_echo(args)
    (out / "model.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    best = lb.best()
    print(f"evaluated {len(lb)} candidates; best {best.config.kind} cv={best.score:.3f}")
    print("ensemble: " + ", ".join(f"{m.config.kind} x{m.multiplicity}" for m in ensemble.members))
    print(f"wrote {out / 'model.json'}, {out / 'leaderboard.tsv'}, {out / 'dictionary.tsv'}")
    return 0


def _config_echo(args) -> dict:
    echo = {
        "data": args.data,
        "max_n": args.max_n,
        "min_freq": args.min_freq,
        "scheme": args.scheme,
        "use_stopwords": not args.no_stopwords,
        "stoplist_path": args.stoplist,
        "smote": not args.no_smote,
        "smote_k": args.smote_k,
        "folds": args.folds,
        "max_candidates": args.max_candidates,
        "budget_seconds": args.budget_seconds,
        "ensemble_size": args.ensemble_size,
        "seed": args.seed,
    }
    return echo


def cmd_evaluate(args) -> int:
    ds = load_dataset(args.data, fmt=args.format)
    cfg = RunConfig(
        rounds=args.rounds,
        test_fraction=args.test_fraction,
        seed=args.seed,
        use_stopwords=not args.no_stopwords,
        stoplist_path=args.stoplist,
        max_n=args.max_n,
        min_freq=args.min_freq,
        scheme=args.scheme,
        smote=not args.no_smote,
        smote_k=args.smote_k,
        folds=args.folds,
        max_candidates=args.max_candidates,
        budget_seconds=args.budget_seconds,
        ensemble_size=args.ensemble_size,
        top_ngrams=args.top_ngrams,
    )
    report = run_experiment(ds, cfg)
    report.payload["dataset"]["path"] = args.data
    out = _out_dir(args)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    table = report.render_table()
    (out / "report.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    print(f"wrote {out / 'report.json'} and {out / 'report.txt'}")
    return 0


def cmd_report(args) -> int:
    path = Path(args.report_path)
    if not path.exists():
        raise ValueError(f"report file not found: {path}")
    payload = json.loads(path.read_text(encoding="utf-8"))
    print(render_report(payload), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sentigram",
        description=(
            "Sentiment classification for software-engineering text: phrase-IDF "
            "features, a searched model portfolio, and a stratified evaluation harness."
        ),
        epilog=f"Default output directory comes from ${ENV_OUT_DIR} (falling back to ./runs).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="print the class distribution of a dataset")
    _add_data_arg(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("extract", help="build and export the phrase dictionary")
    _add_data_arg(p)
    _add_pipeline_args(p)
    p.add_argument("--out", default=None, help="dictionary TSV path (default OUT_DIR/dictionary.tsv)")
    _add_out_dir(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="search, select, and refit an ensemble on all data")
    _add_data_arg(p)
    _add_pipeline_args(p)
    _add_search_args(p)
    _add_out_dir(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="run the multi-round evaluation protocol")
    _add_data_arg(p)
    _add_pipeline_args(p)
    _add_search_args(p)
    g = p.add_argument_group("evaluation protocol")
    g.add_argument("--rounds", type=int, default=10, help="stratified rounds (default 10)")
    g.add_argument(
        "--test-fraction", type=float, default=0.1, help="held-out share per round (default 0.1)"
    )
    g.add_argument("--top-ngrams", type=int, default=10, help="phrases listed per class")
    _add_out_dir(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="re-render a JSON report as a table")
    p.add_argument("report_path", help="path to a report.json produced by evaluate")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
