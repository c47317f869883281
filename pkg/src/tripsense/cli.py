"""Command-line entry point.

Subcommands: generate | ingest | features | select | train | evaluate |
run | export-tree. Exit codes: 0 success, 2 bad usage, 3 data error,
4 internal error. The TRIPSENSE_SEED environment variable overrides the
default seed (42) when --seed is not given.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from .aggregate import build_dataset, read_features_csv, write_features_csv
from .errors import DataError, TripsenseError
from .featselect import selection_to_dict
from .evaluate import evaluate_model, report_to_json, write_roc_csv
from .ingest import (
    DEFAULT_UTC_OFFSET_MINUTES,
    clean_and_group,
    parse_sensor_csv,
    write_sensor_csv,
)
from .learners import (
    DecisionTreeModel,
    LogRegParams,
    RandomForestParams,
    SvmParams,
    TreeParams,
    model_from_json,
    model_to_json,
)
from .pipeline import (
    MODEL_NAMES,
    PipelineConfig,
    StageError,
    derive_stage_seeds,
    export_tree_dot,
    file_sha256,
    fit_model,
    run_pipeline,
    run_selection,
    stage,
    write_json,
)
from .resample import SmoteParams, smote
from .synthgen import GenConfig, generate_corpus, write_truth_csv


def default_seed() -> int:
    return int(os.environ.get("TRIPSENSE_SEED", "42"))


def _add_seed(parser):
    parser.add_argument("--seed", type=int, default=None,
                        help="top-level seed (default: TRIPSENSE_SEED or 42)")


def _add_selection_args(parser):
    parser.add_argument("--method", "--select", dest="method", default="kbest",
                        choices=["kbest", "percentile", "pca", "rf", "rfecv"])
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--percentile", type=float, default=23.4)
    parser.add_argument("--components", type=int, default=5)
    parser.add_argument("--folds", type=int, default=5)


def _add_model_args(parser):
    parser.add_argument("--model", default="dt", choices=["dt", "rf", "logreg", "svm"])
    parser.add_argument("--max-depth", type=int, default=5)
    parser.add_argument("--min-samples-split", type=int, default=10)
    parser.add_argument("--min-samples-leaf", type=int, default=5)
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--features-per-split", type=int, default=None)
    parser.add_argument("--no-bootstrap", action="store_true")
    parser.add_argument("--learning-rate", type=float, default=0.1)
    parser.add_argument("--max-iters", type=int, default=5000)
    parser.add_argument("--l2", type=float, default=0.0)
    parser.add_argument("--gamma", type=float, default=1.0 / 47.0)
    parser.add_argument("--lam", type=float, default=1e-3)
    parser.add_argument("--epochs", type=int, default=200)


def _add_smote_args(parser, default_on: bool):
    if default_on:
        parser.add_argument("--no-smote", dest="smote", action="store_false")
    else:
        parser.add_argument("--smote", dest="smote", action="store_true")
    parser.add_argument("--smote-k", type=int, default=5)
    parser.add_argument("--target-ratio", type=float, default=1.0)
    parser.add_argument("--smote-standardize", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tripsense",
        description="Trip-level alcohol-influence detection pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic sensor corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--trips", type=int, default=108)
    p.add_argument("--positive", type=int, default=14)
    p.add_argument("--drivers", type=int, default=21)
    p.add_argument("--private-drivers", type=int, default=5)
    p.add_argument("--min-points", type=int, default=300)
    p.add_argument("--max-points", type=int, default=3000)
    p.add_argument("--strength", type=float, default=1.0)
    p.add_argument("--utc-offset", type=int, default=DEFAULT_UTC_OFFSET_MINUTES)
    _add_seed(p)

    p = sub.add_parser("ingest", help="clean a corpus; write cleaned.csv and report")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("features", help="aggregate a corpus into features.csv")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--utc-offset", type=int, default=DEFAULT_UTC_OFFSET_MINUTES)

    p = sub.add_parser("select", help="rank and select features")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    _add_selection_args(p)
    _add_model_args(p)
    _add_seed(p)

    p = sub.add_parser("train", help="fit a model on a feature file (treated as training set)")
    p.add_argument("--features", required=True)
    p.add_argument("--selection", default=None, help="selection.json restricting columns")
    p.add_argument("--out", required=True)
    _add_model_args(p)
    _add_smote_args(p, default_on=False)
    p.add_argument("--threads", type=int, default=1)
    _add_seed(p)

    p = sub.add_parser("evaluate", help="evaluate a model.json on a feature file")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("export-tree", help="render a decision tree model as DOT")
    p.add_argument("--model", required=True)
    p.add_argument("--out", default="-", help="output file, or - for stdout")

    p = sub.add_parser("run", help="full pipeline: ingest through evaluation")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--utc-offset", type=int, default=DEFAULT_UTC_OFFSET_MINUTES)
    _add_selection_args(p)
    _add_model_args(p)
    _add_smote_args(p, default_on=True)
    p.add_argument("--paper-order", action="store_true",
                   help="oversample the full dataset before splitting")
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--threads", type=int, default=1)
    _add_seed(p)

    return parser


def _seed_of(args) -> int:
    return args.seed if getattr(args, "seed", None) is not None else default_seed()


def _load_model(path: str):
    try:
        return model_from_json(Path(path).read_text(encoding="utf-8"))
    except (KeyError, ValueError, TypeError) as exc:
        raise DataError(f"cannot load model from {path}: {exc}") from exc


def _tree_params(args, seed) -> TreeParams:
    return TreeParams(
        max_depth=args.max_depth,
        min_samples_split=args.min_samples_split,
        min_samples_leaf=args.min_samples_leaf,
        seed=seed,
    )


def _pipeline_config(args) -> PipelineConfig:
    seed = _seed_of(args)
    tree = _tree_params(args, seed)
    return PipelineConfig(
        input_path=args.input,
        out_dir=args.out,
        utc_offset_minutes=args.utc_offset,
        selection_method=args.method,
        selection_k=args.k,
        selection_percentile=args.percentile,
        selection_components=args.components,
        selection_folds=args.folds,
        model=args.model,
        tree=tree,
        forest=RandomForestParams(
            n_trees=args.trees,
            tree=tree,
            features_per_split=args.features_per_split,
            bootstrap=not args.no_bootstrap,
            seed=seed,
        ),
        logreg=LogRegParams(
            learning_rate=args.learning_rate, max_iters=args.max_iters, l2=args.l2
        ),
        svm=SvmParams(gamma=args.gamma, lam=args.lam, epochs=args.epochs, seed=seed),
        smote_enabled=args.smote,
        smote_params=SmoteParams(
            k_neighbors=args.smote_k,
            target_ratio=args.target_ratio,
            standardize=args.smote_standardize,
        ),
        paper_order=args.paper_order,
        test_fraction=args.test_fraction,
        seed=seed,
        threads=args.threads,
    )


def cmd_generate(args) -> int:
    config = GenConfig(
        n_trips=args.trips,
        n_positive=args.positive,
        n_drivers=args.drivers,
        n_private_drivers=args.private_drivers,
        min_points=args.min_points,
        max_points=args.max_points,
        seed=_seed_of(args),
        signature_strength=args.strength,
        utc_offset_minutes=args.utc_offset,
    )
    out = Path(args.out)
    with stage("generate"):
        out.mkdir(parents=True, exist_ok=True)
        records, truth = generate_corpus(config)
        write_sensor_csv(records, out / "corpus.csv")
        write_truth_csv(truth, out / "truth.csv")
    positives = sum(truth.values())
    print(f"wrote {out / 'corpus.csv'} ({len(records)} rows, {len(truth)} trips, "
          f"{positives} positive)")
    print(f"wrote {out / 'truth.csv'}")
    return 0


def cmd_ingest(args) -> int:
    out = Path(args.out)
    with stage("ingest"):
        out.mkdir(parents=True, exist_ok=True)
        records = parse_sensor_csv(args.input)
        trips, report = clean_and_group(records)
        kept = [p for trip in trips for p in trip.points]
        write_sensor_csv(kept, out / "cleaned.csv")
        (out / "cleaning_report.json").write_text(report.to_json(), encoding="utf-8")
    print(f"kept {report.trips_kept}/{report.trips_in} trips "
          f"({report.points_kept}/{report.points_in} points)")
    return 0


def cmd_features(args) -> int:
    out = Path(args.out)
    with stage("features"):
        out.mkdir(parents=True, exist_ok=True)
        records = parse_sensor_csv(args.input)
        trips, _ = clean_and_group(records)
        dataset = build_dataset(trips, args.utc_offset)
        write_features_csv(dataset, out / "features.csv")
    print(f"wrote {out / 'features.csv'} ({dataset.n_rows} trips x {dataset.n_features} features)")
    return 0


def cmd_select(args) -> int:
    out = Path(args.out)
    seed = _seed_of(args)
    with stage("select"):
        out.mkdir(parents=True, exist_ok=True)
        dataset = read_features_csv(args.features)
        config = _pipeline_config_from_select(args, seed)
        result = run_selection(dataset, config, derive_stage_seeds(seed)["selection"])
        write_json(selection_to_dict(result, dataset.feature_names), out / "selection.json")
    names = [dataset.feature_names[i] for i in result.selected_indices]
    print(f"selected {len(names)} features: {', '.join(names)}")
    return 0


def _pipeline_config_from_select(args, seed) -> PipelineConfig:
    tree = _tree_params(args, seed)
    return PipelineConfig(
        input_path="",
        out_dir=args.out,
        selection_method=args.method,
        selection_k=args.k,
        selection_percentile=args.percentile,
        selection_components=args.components,
        selection_folds=args.folds,
        tree=tree,
        forest=RandomForestParams(
            n_trees=args.trees,
            tree=tree,
            features_per_split=args.features_per_split,
            bootstrap=not args.no_bootstrap,
            seed=seed,
        ),
        seed=seed,
    )


def cmd_train(args) -> int:
    out = Path(args.out)
    seed = _seed_of(args)
    seeds = derive_stage_seeds(seed)
    with stage("train"):
        out.mkdir(parents=True, exist_ok=True)
        dataset = read_features_csv(args.features)
        if args.selection:
            selection = json.loads(Path(args.selection).read_text(encoding="utf-8"))
            name_to_idx = {n: i for i, n in enumerate(dataset.feature_names)}
            try:
                selected = [name_to_idx[n] for n in selection["selected"]]
            except KeyError as exc:
                raise DataError(f"selection names not in feature file: {exc}") from exc
        else:
            selected = list(range(dataset.n_features))
        if args.smote:
            dataset = smote(
                dataset,
                SmoteParams(
                    k_neighbors=args.smote_k,
                    seed=seeds["smote"],
                    target_ratio=args.target_ratio,
                    standardize=args.smote_standardize,
                ),
            )
        tree = _tree_params(args, seed)
        config = PipelineConfig(
            input_path=args.features,
            out_dir=args.out,
            model=args.model,
            tree=tree,
            forest=RandomForestParams(
                n_trees=args.trees,
                tree=tree,
                features_per_split=args.features_per_split,
                bootstrap=not args.no_bootstrap,
                seed=seed,
            ),
            logreg=LogRegParams(
                learning_rate=args.learning_rate, max_iters=args.max_iters, l2=args.l2
            ),
            svm=SvmParams(gamma=args.gamma, lam=args.lam, epochs=args.epochs, seed=seed),
            seed=seed,
            threads=args.threads,
        )
        model = fit_model(
            config,
            dataset.features[:, selected],
            dataset.labels,
            feature_names=[dataset.feature_names[i] for i in selected],
            feature_indices=selected,
        )
        (out / "model.json").write_text(model_to_json(model), encoding="utf-8")
        if isinstance(model, DecisionTreeModel):
            (out / "tree.dot").write_text(export_tree_dot(model), encoding="utf-8")
    print(f"trained {MODEL_NAMES[args.model]} on {dataset.n_rows} rows, "
          f"{len(selected)} features; wrote {out / 'model.json'}")
    return 0


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    with stage("evaluate"):
        out.mkdir(parents=True, exist_ok=True)
        model = _load_model(args.model)
        dataset = read_features_csv(args.features)
        report = evaluate_model(model, dataset)
        provenance = {
            "model_file": {"path": args.model, "sha256": file_sha256(args.model)},
            "features_file": {"path": args.features, "sha256": file_sha256(args.features)},
        }
        (out / "report.json").write_text(report_to_json(report, provenance), encoding="utf-8")
        write_roc_csv(report, out / "roc.csv")
    print(f"{report.model_name}: accuracy={report.accuracy:.4f} precision={report.precision:.4f} "
          f"recall={report.recall:.4f} f1={report.f1:.4f} auc={report.auc:.4f}")
    return 0


def cmd_export_tree(args) -> int:
    with stage("export-tree"):
        model = _load_model(args.model)
        if not isinstance(model, DecisionTreeModel):
            raise DataError(f"model {args.model} is a {model.name}, not a decision tree")
        dot = export_tree_dot(model)
        if args.out == "-":
            sys.stdout.write(dot)
        else:
            Path(args.out).write_text(dot, encoding="utf-8")
    return 0


def cmd_run(args) -> int:
    config = _pipeline_config(args)
    result = run_pipeline(config)
    report = result["report"]
    cleaning = result["cleaning"]
    print(f"ingest: kept {cleaning.trips_kept}/{cleaning.trips_in} trips")
    print(f"selection ({config.selection_method}): "
          f"{len(result['selection'].selected_indices)} features")
    print(f"{report.model_name}: accuracy={report.accuracy:.4f} precision={report.precision:.4f} "
          f"recall={report.recall:.4f} f1={report.f1:.4f} auc={report.auc:.4f}")
    print(f"outputs in {result['out_dir']}")
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "ingest": cmd_ingest,
    "features": cmd_features,
    "select": cmd_select,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "export-tree": cmd_export_tree,
    "run": cmd_run,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except StageError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TripsenseError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # noqa: BLE001 - invariant violations exit 4
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
