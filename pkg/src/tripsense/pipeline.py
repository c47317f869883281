"""One-shot pipeline orchestration and file outputs.

Stage order: parse and clean the corpus, aggregate per-trip features, select
features on the full dataset, split stratified, oversample the training
side (or, with paper_order, oversample first and then split), fit, evaluate,
and write every artifact with a provenance block so reruns are byte-stable.
"""

import hashlib
import json
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .aggregate import build_dataset, write_features_csv
from .core import LabeledDataset
from .errors import DataError
from .evaluate import evaluate_model, report_to_json, stratified_split, write_roc_csv
from .featselect import (
    SelectionResult,
    pca_loading_select,
    rf_importance_select,
    rfecv,
    select_k_best,
    select_percentile,
    selection_to_dict,
)
from .ingest import DEFAULT_UTC_OFFSET_MINUTES, clean_and_group, parse_sensor_csv
from .learners import (
    DecisionTreeModel,
    LogRegParams,
    RandomForestParams,
    SvmParams,
    TreeParams,
    fit_decision_tree,
    fit_logistic_regression,
    fit_random_forest,
    fit_svm_rbf,
    gini,
    model_to_json,
)
from .resample import SmoteParams, smote

MODEL_NAMES = {
    "dt": "decision_tree",
    "rf": "random_forest",
    "logreg": "logistic_regression",
    "svm": "svm_rbf",
}

SELECTION_DEFAULTS = {"k": 10, "percentile": 23.4, "n_components": 5, "n_folds": 5}


class StageError(DataError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


@contextmanager
def stage(name: str):
    """Attribute data and I/O failures to the pipeline stage they occur in."""
    try:
        yield
    except StageError:
        raise
    except (DataError, OSError, json.JSONDecodeError) as exc:
        raise StageError(name, exc) from exc


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str
    out_dir: str
    utc_offset_minutes: int = DEFAULT_UTC_OFFSET_MINUTES
    selection_method: str = "kbest"
    selection_k: int = SELECTION_DEFAULTS["k"]
    selection_percentile: float = SELECTION_DEFAULTS["percentile"]
    selection_components: int = SELECTION_DEFAULTS["n_components"]
    selection_folds: int = SELECTION_DEFAULTS["n_folds"]
    model: str = "dt"
    tree: TreeParams = TreeParams()
    forest: RandomForestParams = RandomForestParams()
    logreg: LogRegParams = LogRegParams()
    svm: SvmParams = SvmParams()
    smote_enabled: bool = True
    smote_params: SmoteParams = SmoteParams()
    paper_order: bool = False
    test_fraction: float = 0.2
    seed: int = 42
    threads: int = 1


def derive_stage_seeds(seed: int) -> dict[str, int]:
    """Single documented derivation of per-stage seeds from the top seed."""
    return {"split": seed, "smote": seed + 1, "selection": seed + 2, "model": seed}


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_json(payload: dict, path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run_selection(dataset: LabeledDataset, config: PipelineConfig, seed: int) -> SelectionResult:
    method = config.selection_method
    if method == "kbest":
        return select_k_best(dataset, config.selection_k)
    if method == "percentile":
        return select_percentile(dataset, config.selection_percentile)
    if method == "pca":
        return pca_loading_select(dataset, config.selection_components, config.selection_k)
    if method == "rf":
        params = RandomForestParams(
            n_trees=config.forest.n_trees,
            tree=config.tree,
            features_per_split=config.forest.features_per_split,
            bootstrap=config.forest.bootstrap,
            seed=seed,
        )
        return rf_importance_select(dataset, config.selection_k, params)
    if method == "rfecv":
        return rfecv(dataset, config.tree, config.selection_folds, seed)
    raise DataError(f"unknown selection method {method!r}")


def fit_model(config: PipelineConfig, X, y, feature_names, feature_indices):
    name = config.model
    kwargs = {"feature_names": feature_names, "feature_indices": feature_indices}
    if name == "dt":
        return fit_decision_tree(X, y, config.tree, **kwargs)
    if name == "rf":
        return fit_random_forest(X, y, config.forest, threads=config.threads, **kwargs)
    if name == "logreg":
        return fit_logistic_regression(X, y, config.logreg, **kwargs)
    if name == "svm":
        return fit_svm_rbf(X, y, config.svm, **kwargs)
    raise DataError(f"unknown model {name!r}")


def export_tree_dot(model: DecisionTreeModel) -> str:
    """Graphviz rendering of a fitted tree.

    Internal nodes show "name <= threshold", impurity, and sample count;
    leaves show class counts and the predicted class. Left edges are the
    "true" branch of the comparison.
    """
    names = model.feature_names
    lines = ["digraph decision_tree {", "  node [shape=box];"]
    counter = [0]

    def emit(node) -> int:
        node_id = counter[0]
        counter[0] += 1
        if node.is_leaf:
            label = (
                f"samples={node.n_samples}\\n"
                f"counts={list(node.counts)}\\n"
                f"class={1 if node.score >= 0.5 else 0}"
            )
            lines.append(f'  n{node_id} [label="{label}"];')
            return node_id
        name = names[node.feature] if names else f"f{node.feature}"
        label = (
            f"{name} ≤ {node.threshold!r}\\n"
            f"gini={gini(node.counts):.4f}\\n"
            f"samples={node.n_samples}"
        )
        lines.append(f'  n{node_id} [label="{label}"];')
        left_id = emit(node.left)
        right_id = emit(node.right)
        lines.append(f'  n{node_id} -> n{left_id} [label="true"];')
        lines.append(f'  n{node_id} -> n{right_id} [label="false"];')
        return node_id

    emit(model.root)
    lines.append("}")
    return "\n".join(lines) + "\n"


def build_provenance(config: PipelineConfig, selection, selected_names, counts) -> dict:
    return {
        "toolkit_version": __version__,
        "input": {"path": str(config.input_path), "sha256": file_sha256(config.input_path)},
        "seed": config.seed,
        "stage_seeds": derive_stage_seeds(config.seed),
        "utc_offset_minutes": config.utc_offset_minutes,
        "selection": {
            "method": config.selection_method,
            "k": config.selection_k,
            "percentile": config.selection_percentile,
            "n_components": config.selection_components,
            "n_folds": config.selection_folds,
            "selected": selected_names,
        },
        "smote": {
            "enabled": config.smote_enabled,
            "k_neighbors": config.smote_params.k_neighbors,
            "target_ratio": config.smote_params.target_ratio,
            "standardize": config.smote_params.standardize,
            "order": (
                "resample-then-split" if config.paper_order else "split-then-resample"
            )
            if config.smote_enabled
            else None,
            "paper_order": config.paper_order,
        },
        "model": {"name": MODEL_NAMES[config.model], **_model_params(config)},
        "split": {"test_fraction": config.test_fraction},
        "counts": counts,
        "threads": config.threads,
    }


def _model_params(config: PipelineConfig) -> dict:
    if config.model == "dt":
        p = config.tree
        return {
            "max_depth": p.max_depth,
            "min_samples_split": p.min_samples_split,
            "min_samples_leaf": p.min_samples_leaf,
            "seed": p.seed,
        }
    if config.model == "rf":
        p = config.forest
        return {
            "n_trees": p.n_trees,
            "features_per_split": p.features_per_split,
            "bootstrap": p.bootstrap,
            "seed": p.seed,
            "max_depth": p.tree.max_depth,
            "min_samples_split": p.tree.min_samples_split,
            "min_samples_leaf": p.tree.min_samples_leaf,
        }
    if config.model == "logreg":
        p = config.logreg
        return {
            "learning_rate": p.learning_rate,
            "max_iters": p.max_iters,
            "l2": p.l2,
            "tolerance": p.tolerance,
            "standardize": p.standardize,
        }
    p = config.svm
    return {
        "gamma": p.gamma,
        "lam": p.lam,
        "epochs": p.epochs,
        "seed": p.seed,
        "standardize": p.standardize,
    }


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute the full pipeline; returns a summary dict of outputs."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = derive_stage_seeds(config.seed)

    with stage("ingest"):
        records = parse_sensor_csv(config.input_path)
        trips, cleaning = clean_and_group(records)
        (out / "cleaning_report.json").write_text(cleaning.to_json(), encoding="utf-8")

    with stage("aggregate"):
        dataset = build_dataset(trips, config.utc_offset_minutes)
        write_features_csv(dataset, out / "features.csv")

    with stage("select"):
        selection = run_selection(dataset, config, seeds["selection"])
        selected = list(selection.selected_indices)
        selected_names = [dataset.feature_names[i] for i in selected]
        write_json(selection_to_dict(selection, dataset.feature_names), out / "selection.json")

    with stage("resample"):
        smote_params = SmoteParams(
            k_neighbors=config.smote_params.k_neighbors,
            seed=seeds["smote"],
            target_ratio=config.smote_params.target_ratio,
            standardize=config.smote_params.standardize,
        )
        if config.smote_enabled and config.paper_order:
            resampled = smote(dataset, smote_params)
            train, test = stratified_split(resampled, config.test_fraction, seeds["split"])
        else:
            train, test = stratified_split(dataset, config.test_fraction, seeds["split"])
            if config.smote_enabled:
                train = smote(train, smote_params)

    with stage("train"):
        model = fit_model(
            config,
            train.features[:, selected],
            train.labels,
            feature_names=selected_names,
            feature_indices=selected,
        )
        (out / "model.json").write_text(model_to_json(model), encoding="utf-8")
        if isinstance(model, DecisionTreeModel):
            (out / "tree.dot").write_text(export_tree_dot(model), encoding="utf-8")

    with stage("evaluate"):
        report = evaluate_model(model, test)
        counts = {
            "trips_kept": cleaning.trips_kept,
            "rows": dataset.n_rows,
            "train_rows": train.n_rows,
            "test_rows": test.n_rows,
            "train_class_counts": list(train.class_counts()),
            "test_class_counts": list(test.class_counts()),
        }
        provenance = build_provenance(config, selection, selected_names, counts)
        (out / "report.json").write_text(
            report_to_json(report, provenance), encoding="utf-8"
        )
        write_roc_csv(report, out / "roc.csv")

    return {
        "cleaning": cleaning,
        "report": report,
        "model": model,
        "selection": selection,
        "out_dir": str(out),
    }
