"""Command-line entry point: ``altsent <command> [options]``.

Exit codes: 0 success, 2 I/O failure, 64 usage error, 65 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import corpus
from .evaluation import classification_report, mse, r_squared
from .features import (
    CaseConfig,
    FeatureFileError,
    build_dataset,
    correlation_matrix,
    format_distribution,
    read_feature_csv,
    write_feature_csv,
)
from .models import FAMILIES, ModelFormatError, load_model, save_model, zscore_apply
from .pipeline import ExperimentConfig, ExperimentError, run_experiment, select_task_rows
from .sentiment import LexiconError, load_lexicon, sample_lexicon, top_words

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_DATA = 0, 2, 64, 65

log = logging.getLogger("altsent")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, ensure_ascii=False, allow_nan=False)
        fh.write("\n")


def _load_lexicon(path):
    if path is None:
        return sample_lexicon()
    try:
        return load_lexicon(path)
    except LexiconError as exc:
        raise DataError(str(exc)) from None


def _read_validated(path) -> tuple[list, int]:
    records, skipped = corpus.read_corpus(path)
    records, dropped = corpus.validate_and_filter(records)
    return records, skipped + dropped


# --------------------------------------------------------------------------
# commands


def cmd_ingest(args) -> int:
    records, dropped = _read_validated(args.input)
    if args.sample is not None:
        if args.sample < 0 or args.sample > len(records):
            raise UsageError(f"--sample {args.sample} exceeds the {len(records)} valid records")
        records = corpus.sample_without_replacement(records, args.sample, args.seed)
    corpus.write_corpus(records, args.output)
    print(f"wrote {len(records)} records to {args.output}; dropped {dropped} records")
    return EXIT_OK


def _write_table(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_trends(args) -> int:
    records, dropped = _read_validated(args.input)
    summary = corpus.summarize(records, dropped)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "summary.json", summary.to_dict())
    _write_table(out / "tweets_per_year.csv", ("year", "tweets"), summary.tweets_per_year.items())
    _write_table(out / "tweets_per_subject.csv", ("subject", "tweets"), summary.tweets_per_subject.items())
    _write_table(out / "articles_per_subject.csv", ("subject", "articles"), summary.articles_per_subject.items())
    if args.lexicon is not None or args.top_words:
        lexicon = _load_lexicon(args.lexicon)
        table = {}
        for field_name in ("title", "abstract", "tweets"):
            pos, neg = top_words(records, field_name, args.top_k, lexicon)
            table[field_name] = {"positive": pos, "negative": neg}
        _write_json(out / "top_words.json", table)
    print(f"{len(records)} articles, {sum(len(r.tweets) for r in records)} tweets; dropped {dropped} records")
    return EXIT_OK


def cmd_features(args) -> int:
    records, dropped = _read_validated(args.input)
    lexicon = _load_lexicon(args.lexicon)
    case = CaseConfig.from_id(args.case)
    dataset = build_dataset(records, lexicon, case, args.variant, workers=args.workers)
    output = Path(args.output)
    write_feature_csv(dataset, output)
    total = len(dataset)
    distribution = {
        "case": case.case_id,
        "scorer_profile": case.scorer_profile,
        "metric": case.metric.value,
        "variant": args.variant,
        "articles": total,
        "dropped_records": dropped,
        "counts": dataset.distribution,
        "percentages": {k: (100.0 * v / total if total else 0.0) for k, v in dataset.distribution.items()},
    }
    _write_json(output.with_suffix(".distribution.json"), distribution)
    if args.correlation:
        if total >= 2:
            r = correlation_matrix(dataset.X, dataset.target_scores)
            names = list(dataset.feature_names) + ["target_score"]
            rows = [[names[i]] + ["nan" if np.isnan(v) else repr(float(v)) for v in r[i]] for i in range(len(names))]
        else:
            names, rows = [], []
        _write_table(Path(args.correlation), ["feature"] + names, rows)
    print(format_distribution(dataset, case))
    return EXIT_OK


def _load_grid_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            grids = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"grid file {path}: {exc}") from None
    if not isinstance(grids, dict) or not all(isinstance(g, dict) for g in grids.values()):
        raise UsageError("grid file must map model names to {param: [values]} objects")
    return grids


def _resolve_train_config(args) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {args.config}: {exc}") from None
    overrides = {
        "task": args.task,
        "models": args.model,
        "seed": args.seed,
        "cv_folds": args.cv_folds,
        "train_fraction": args.train_fraction,
        "k_neighbors": args.k_neighbors,
        "features_path": args.features,
        "output_dir": args.output,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.no_smote:
        data["smote"] = False
    if args.grid_file:
        data["grids"] = _load_grid_file(args.grid_file)
    if args.n_trees is not None:
        params = data.setdefault("model_params", {})
        for fam in ("random_forest", "random_forest_regressor"):
            params.setdefault(fam, {})["n_trees"] = args.n_trees
    try:
        config = ExperimentConfig.from_dict(data)
        config.validate()
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return config


def cmd_train(args) -> int:
    config = _resolve_train_config(args)
    try:
        dataset = read_feature_csv(config.features_path)
    except FeatureFileError as exc:
        raise DataError(str(exc)) from None
    try:
        result = run_experiment(dataset, config, workers=args.workers)
    except ExperimentError as exc:
        raise UsageError(str(exc)) from None
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for trained in result.models:
        save_model(
            out / f"model_{trained.family}.json",
            trained.model,
            result.scaler,
            result.feature_names,
            meta={"task": config.task, "config": config.to_dict()},
        )
    _write_json(out / "report.json", result.report)
    for family, entry in result.report["models"].items():
        test = entry["test"]
        score = f"accuracy={test['accuracy']:.4f}" if "accuracy" in test else f"r2={test['r_squared']:.4f}"
        print(f"{family}: {score}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    try:
        model, scaler, doc = load_model(args.model)
    except (ModelFormatError, json.JSONDecodeError) as exc:
        raise DataError(f"{args.model}: {exc}") from None
    try:
        dataset = read_feature_csv(args.features)
    except FeatureFileError as exc:
        raise DataError(str(exc)) from None
    expected = doc.get("feature_names")
    if expected is not None and list(dataset.feature_names) != list(expected):
        raise DataError(f"feature columns {list(dataset.feature_names)} do not match the model's {expected}")
    if dataset.X.shape[1] != model.n_features_in_:
        raise DataError(f"model expects {model.n_features_in_} features, file has {dataset.X.shape[1]}")
    task = doc.get("meta", {}).get("task", "three-class" if model.is_classifier else "regression")
    X, y, _ = select_task_rows(dataset, task)
    if len(y) == 0:
        raise DataError("no rows to evaluate")
    if scaler is not None:
        X = zscore_apply(X, scaler)
    pred = model.predict(X)
    report: dict = {"model": str(args.model), "family": doc["family"], "task": task, "n_rows": int(len(y))}
    if model.is_classifier:
        classes = sorted(set(model.classes_.tolist()) | set(y.tolist()))
        report["metrics"] = classification_report(y.tolist(), pred.tolist(), classes).to_dict()
    else:
        report["metrics"] = {"mse": mse(y, pred), "r_squared": r_squared(y, pred)}
    report["predictions"] = [p if isinstance(p, str) else float(p) for p in pred.tolist()]
    _write_json(Path(args.output), report)
    m = report["metrics"]
    print(f"accuracy={m['accuracy']:.4f}" if "accuracy" in m else f"r2={m['r_squared']:.4f}")
    return EXIT_OK


def _parse_mix(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"mix must be three comma-separated numbers, got {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("mix needs exactly three values p,n,z")
    return parts


def cmd_synth(args) -> int:
    spec = corpus.SyntheticSpec(
        n_articles=args.articles,
        seed=args.seed,
        mix=args.mix,
        label_noise=args.noise,
        title_quote_rate=args.title_quote_rate,
        max_tweets=args.max_tweets,
    )
    try:
        records = corpus.generate_synthetic_corpus(spec, _load_lexicon(args.lexicon))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    corpus.write_corpus(records, args.output)
    print(f"wrote {len(records)} synthetic articles to {args.output}")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--workers", type=int, default=1, help="worker threads (outputs do not depend on it)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="altsent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="parse, validate and optionally sample a JSONL corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--sample", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("trends", parents=[common], help="tweet and article counts per year and subject")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--lexicon", help="lexicon TSV for the top-words table (default: bundled sample)")
    p.add_argument("--top-words", action="store_true", help="also write top_words.json")
    p.add_argument("--top-k", type=int, default=25)
    p.set_defaults(func=cmd_trends)

    p = sub.add_parser("features", parents=[common], help="derive the model feature CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--case", type=int, choices=(1, 2, 3, 4), default=4)
    p.add_argument("--variant", choices=("A", "B"), default="A")
    p.add_argument("--output", required=True)
    p.add_argument("--correlation", help="also write the Pearson correlation matrix CSV here")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", parents=[common], help="run the training pipeline on a feature CSV")
    p.add_argument("--features")
    p.add_argument("--config", help="JSON experiment config; flags override its values")
    p.add_argument("--task", choices=("binary", "three-class", "regression"))
    p.add_argument("--model", nargs="+", choices=FAMILIES)
    p.add_argument("--grid-file", help="JSON {model: {param: [values]}} overriding default grids")
    p.add_argument("--n-trees", type=int, help="forest size (default 100)")
    p.add_argument("--cv-folds", type=int)
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--k-neighbors", type=int, help="SMOTE neighbours")
    p.add_argument("--no-smote", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--output", help="output directory for model_<family>.json and report.json")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common], help="score a saved model on a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus")
    p.add_argument("--articles", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mix", type=_parse_mix, default=(1.0, 1.0, 1.0), help="positive,negative,neutral weights")
    p.add_argument("--noise", type=float, default=0.0, help="probability a title disagrees with its tweets")
    p.add_argument("--title-quote-rate", type=float, default=0.0)
    p.add_argument("--max-tweets", type=int, default=5)
    p.add_argument("--lexicon")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    if args.command == "train" and (args.features is None and args.config is None or args.output is None and args.config is None):
        parser.error("train needs --features and --output (or a --config providing them)")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"altsent {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"altsent {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"altsent {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
