import json

import numpy as np
import pytest

from tripsense.cli import main
from tripsense.learners import TreeParams, fit_decision_tree, model_to_json
from tripsense.pipeline import export_tree_dot


def run_cli(*args) -> int:
    return main(list(args))


def dot_counts(dot: str) -> tuple[int, int]:
    nodes = sum(1 for line in dot.splitlines() if "[label=" in line and "->" not in line)
    edges = sum(1 for line in dot.splitlines() if "->" in line)
    return nodes, edges


class TestGenerateCommand:
    def test_writes_corpus_and_truth(self, tmp_path):
        code = run_cli(
            "generate", "--out", str(tmp_path), "--trips", "10", "--positive", "2",
            "--min-points", "30", "--max-points", "50", "--seed", "3",
        )
        assert code == 0
        truth = (tmp_path / "truth.csv").read_text().strip().splitlines()
        assert len(truth) == 11
        assert sum(line.endswith(",1") for line in truth[1:]) == 2

    def test_rerun_is_byte_identical(self, tmp_path):
        args = (
            "generate", "--trips", "8", "--positive", "2",
            "--min-points", "30", "--max-points", "40", "--seed", "11",
        )
        run_cli(*args, "--out", str(tmp_path / "a"))
        run_cli(*args, "--out", str(tmp_path / "b"))
        assert (tmp_path / "a/corpus.csv").read_bytes() == (tmp_path / "b/corpus.csv").read_bytes()
        assert (tmp_path / "a/truth.csv").read_bytes() == (tmp_path / "b/truth.csv").read_bytes()

    def test_env_seed_override(self, tmp_path, monkeypatch):
        args = (
            "generate", "--trips", "6", "--positive", "1",
            "--min-points", "30", "--max-points", "40",
        )
        monkeypatch.setenv("TRIPSENSE_SEED", "123")
        run_cli(*args, "--out", str(tmp_path / "env"))
        monkeypatch.delenv("TRIPSENSE_SEED")
        run_cli(*args, "--seed", "123", "--out", str(tmp_path / "flag"))
        assert (tmp_path / "env/corpus.csv").read_bytes() == (
            tmp_path / "flag/corpus.csv"
        ).read_bytes()


class TestRunCommand:
    OUTPUTS = (
        "features.csv", "selection.json", "model.json", "report.json",
        "roc.csv", "tree.dot", "cleaning_report.json",
    )

    def test_writes_all_outputs(self, small_corpus_dir, tmp_path):
        code = run_cli(
            "run", "--input", str(small_corpus_dir / "corpus.csv"),
            "--out", str(tmp_path), "--seed", "42",
        )
        assert code == 0
        for name in self.OUTPUTS:
            assert (tmp_path / name).exists(), name

    def test_report_provenance_block(self, small_corpus_dir, tmp_path):
        run_cli(
            "run", "--input", str(small_corpus_dir / "corpus.csv"),
            "--out", str(tmp_path), "--seed", "9",
        )
        report = json.loads((tmp_path / "report.json").read_text())
        prov = report["provenance"]
        assert prov["seed"] == 9
        assert prov["stage_seeds"] == {"split": 9, "smote": 10, "selection": 11, "model": 9}
        assert len(prov["input"]["sha256"]) == 64
        assert prov["smote"]["order"] == "split-then-resample"
        assert prov["model"]["name"] == "decision_tree"
        assert prov["selection"]["method"] == "kbest"
        assert len(prov["selection"]["selected"]) == 10

    def test_logreg_model_name_in_report(self, small_corpus_dir, tmp_path):
        run_cli(
            "run", "--input", str(small_corpus_dir / "corpus.csv"),
            "--out", str(tmp_path), "--model", "logreg", "--max-iters", "200",
        )
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["model"] == "logistic_regression"
        assert not (tmp_path / "tree.dot").exists()

    def test_paper_order_recorded(self, small_corpus_dir, tmp_path):
        run_cli(
            "run", "--input", str(small_corpus_dir / "corpus.csv"),
            "--out", str(tmp_path), "--paper-order",
        )
        prov = json.loads((tmp_path / "report.json").read_text())["provenance"]
        assert prov["smote"]["order"] == "resample-then-split"
        assert prov["smote"]["paper_order"] is True

    def test_no_smote_flag(self, small_corpus_dir, tmp_path):
        run_cli(
            "run", "--input", str(small_corpus_dir / "corpus.csv"),
            "--out", str(tmp_path), "--no-smote",
        )
        prov = json.loads((tmp_path / "report.json").read_text())["provenance"]
        assert prov["smote"]["enabled"] is False
        assert prov["smote"]["order"] is None

    def test_other_models_run(self, small_corpus_dir, tmp_path):
        for model, extra in (
            ("rf", ("--trees", "10")),
            ("svm", ("--epochs", "20")),
        ):
            out = tmp_path / model
            code = run_cli(
                "run", "--input", str(small_corpus_dir / "corpus.csv"),
                "--out", str(out), "--model", model, *extra,
            )
            assert code == 0
            assert (out / "model.json").exists()

    def test_rfecv_selection_runs(self, small_corpus_dir, tmp_path):
        code = run_cli(
            "run", "--input", str(small_corpus_dir / "corpus.csv"),
            "--out", str(tmp_path), "--method", "rfecv", "--folds", "3",
        )
        assert code == 0
        selection = json.loads((tmp_path / "selection.json").read_text())
        assert selection["method"] == "rfecv"
        assert "scores" not in selection

    def test_pca_and_rf_selection_run(self, small_corpus_dir, tmp_path):
        for method, extra in (
            ("pca", ("--components", "4")),
            ("rf", ("--trees", "15")),
        ):
            out = tmp_path / method
            code = run_cli(
                "run", "--input", str(small_corpus_dir / "corpus.csv"),
                "--out", str(out), "--method", method, "--k", "8", *extra,
            )
            assert code == 0
            selection = json.loads((out / "selection.json").read_text())
            assert len(selection["selected"]) == 8


class TestStepwiseCommands:
    def test_ingest_features_select_train_evaluate(self, small_corpus_dir, tmp_path):
        corpus = str(small_corpus_dir / "corpus.csv")
        assert run_cli("ingest", "--input", corpus, "--out", str(tmp_path)) == 0
        report = json.loads((tmp_path / "cleaning_report.json").read_text())
        assert set(report) == {
            "trips_in", "trips_kept", "trips_dropped_no_report",
            "trips_dropped_invalid_influence", "points_in", "points_kept",
        }
        assert report["trips_kept"] == 40

        assert run_cli(
            "features", "--input", str(tmp_path / "cleaned.csv"), "--out", str(tmp_path)
        ) == 0
        assert run_cli(
            "select", "--features", str(tmp_path / "features.csv"),
            "--out", str(tmp_path), "--method", "percentile", "--percentile", "23.4",
        ) == 0
        selection = json.loads((tmp_path / "selection.json").read_text())
        assert len(selection["selected"]) == 11

        assert run_cli(
            "train", "--features", str(tmp_path / "features.csv"),
            "--selection", str(tmp_path / "selection.json"),
            "--out", str(tmp_path), "--smote",
        ) == 0
        assert run_cli(
            "evaluate", "--model", str(tmp_path / "model.json"),
            "--features", str(tmp_path / "features.csv"), "--out", str(tmp_path),
        ) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["model"] == "decision_tree"
        assert (tmp_path / "roc.csv").read_text().startswith("fpr,tpr")


class TestExportTree:
    def test_single_leaf_has_one_node(self, tmp_path, capsys):
        model = fit_decision_tree(
            np.array([[1.0], [2.0]]), np.array([1, 1]),
            TreeParams(max_depth=2, min_samples_split=2, min_samples_leaf=1),
        )
        path = tmp_path / "model.json"
        path.write_text(model_to_json(model))
        assert run_cli("export-tree", "--model", str(path)) == 0
        dot = capsys.readouterr().out
        assert dot.startswith("digraph")
        assert dot_counts(dot) == (1, 0)

    def test_depth_one_tree_three_nodes_two_edges(self, tmp_path):
        model = fit_decision_tree(
            np.array([[1.0], [2.0], [3.0], [4.0]]), np.array([0, 0, 1, 1]),
            TreeParams(max_depth=1, min_samples_split=2, min_samples_leaf=1),
        )
        out = tmp_path / "tree.dot"
        path = tmp_path / "model.json"
        path.write_text(model_to_json(model))
        assert run_cli("export-tree", "--model", str(path), "--out", str(out)) == 0
        dot = out.read_text()
        assert dot_counts(dot) == (3, 2)
        assert dot.count("{") == dot.count("}")
        assert 'label="true"' in dot and 'label="false"' in dot

    def test_labels_carry_feature_name_and_gini(self):
        model = fit_decision_tree(
            np.array([[1.0], [2.0], [3.0], [4.0]]), np.array([0, 0, 1, 1]),
            TreeParams(max_depth=1, min_samples_split=2, min_samples_leaf=1),
            feature_names=["speed_std"],
        )
        dot = export_tree_dot(model)
        assert "speed_std ≤ 2.5" in dot
        assert "gini=0.5000" in dot
        assert "samples=4" in dot

    def test_rejects_non_tree_model(self, small_corpus_dir, tmp_path):
        run_cli(
            "run", "--input", str(small_corpus_dir / "corpus.csv"),
            "--out", str(tmp_path), "--model", "logreg", "--max-iters", "50",
        )
        code = run_cli("export-tree", "--model", str(tmp_path / "model.json"))
        assert code == 3


class TestExitCodes:
    def test_bad_usage_is_2(self):
        assert run_cli("run", "--input") == 2
        assert run_cli("no-such-command") == 2

    def test_missing_file_is_3(self, tmp_path):
        code = run_cli(
            "run", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path)
        )
        assert code == 3

    def test_malformed_csv_is_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("tripId,driverId\nx,y\n")
        code = run_cli("run", "--input", str(bad), "--out", str(tmp_path))
        assert code == 3
        assert "[ingest]" in capsys.readouterr().err

    def test_internal_error_is_4(self, monkeypatch, tmp_path):
        import tripsense.cli as cli_module

        def boom(args):
            raise RuntimeError("wired to fail")

        monkeypatch.setitem(cli_module._COMMANDS, "generate", boom)
        assert run_cli("generate", "--out", str(tmp_path)) == 4

    def test_corrupt_model_json_is_3(self, tmp_path):
        bad = tmp_path / "model.json"
        bad.write_text("{not json")
        assert run_cli("export-tree", "--model", str(bad)) == 3
        bad.write_text('{"model": "decision_tree"}')
        assert run_cli("export-tree", "--model", str(bad)) == 3

    def test_help_is_0(self):
        assert run_cli("--help") == 0


class TestDeterminism:
    def test_run_outputs_byte_identical(self, small_corpus_dir, tmp_path):
        args = (
            "run", "--input", str(small_corpus_dir / "corpus.csv"), "--seed", "42",
        )
        run_cli(*args, "--out", str(tmp_path / "a"))
        run_cli(*args, "--out", str(tmp_path / "b"))
        for name in ("report.json", "model.json", "tree.dot"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes(), name
