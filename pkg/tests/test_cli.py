import json

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from multiemo import builtin_taxonomy, write_corpus
from multiemo.cli import main
from test_split_stats import synthetic_corpus


@pytest.fixture
def runner():
    return CliRunner()


def write_score_csv(path, ids, taxonomy, values):
    lines = ["id," + ",".join(taxonomy.labels)]
    for rid, row in zip(ids, values):
        lines.append(rid + "," + ",".join(f"{v:.6f}" for v in row))
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def corpus_and_scores(tmp_path, ours11):
    corpus = synthetic_corpus(ours11, per_lang=20)
    corpus_path = tmp_path / "gold.jsonl"
    write_corpus(corpus, corpus_path)
    rng = np.random.default_rng(0)
    values = rng.random((len(corpus), 11))
    scores_path = tmp_path / "scores.csv"
    write_score_csv(scores_path, corpus.ids(), ours11, values)
    return corpus_path, scores_path


class TestEvaluate:
    def test_native_view(self, runner, tmp_path, corpus_and_scores):
        gold, scores = corpus_and_scores
        out = tmp_path / "report"
        result = runner.invoke(main, [
            "evaluate", "--gold", str(gold), "--scores", str(scores),
            "--out", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "report.json").read_text())
        assert set(report["metrics"]) >= {"f1_micro", "auc_micro", "lrap"}
        assert (tmp_path / "report.md").exists()
        assert len(report["per_language"]) == 3

    def test_intersection_view_goemotions(self, runner, tmp_path, ours11):
        goe = tmp_path / "goe.tsv"
        # label ids 2=anger, 25=sadness (shared), 1=amusement (not shared)
        goe.write_text("angry text\t2\ta\nsad text\t25\tb\namused\t1\tc\n")
        rng = np.random.default_rng(1)
        scores = tmp_path / "scores.csv"
        write_score_csv(scores, ["a", "b", "c"], ours11, rng.random((3, 11)))
        out = tmp_path / "rep"
        result = runner.invoke(main, [
            "evaluate", "--gold", str(goe), "--gold-format", "goemotions",
            "--scores", str(scores), "--view", "intersection",
            "--out", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "rep.json").read_text())
        assert report["n_labels"] == 9
        # the amusement-only row has no gold inside the 9 shared labels
        assert report["n_rows"] == 2
        assert report["notes"]["rows_dropped_outside_intersection"] == 1

    def test_argmax_rule_flagged(self, runner, tmp_path, corpus_and_scores):
        gold, scores = corpus_and_scores
        out = tmp_path / "rep"
        result = runner.invoke(main, [
            "evaluate", "--gold", str(gold), "--scores", str(scores),
            "--rule", "argmax", "--out", str(out)])
        assert result.exit_code == 0
        report = json.loads((tmp_path / "rep.json").read_text())
        assert "argmax" in report["decision_rule"]

    def test_missing_score_id_error_envelope(self, runner, tmp_path, ours11):
        corpus = synthetic_corpus(ours11, per_lang=3)
        gold = tmp_path / "gold.jsonl"
        write_corpus(corpus, gold)
        scores = tmp_path / "scores.csv"
        rng = np.random.default_rng(2)
        write_score_csv(scores, list(corpus.ids())[:-1], ours11,
                        rng.random((len(corpus) - 1, 11)))
        result = runner.invoke(main, [
            "evaluate", "--gold", str(gold), "--scores", str(scores),
            "--out", str(tmp_path / "rep")])
        assert result.exit_code == 3
        envelope = json.loads(result.stderr)
        assert envelope["error"]["type"] == "AlignmentError"
        assert "fr-2" in envelope["error"]["message"]


class TestCalibrateCompare:
    def test_calibrate_json(self, runner, tmp_path, corpus_and_scores):
        gold, scores = corpus_and_scores
        result = runner.invoke(main, [
            "calibrate", "--scores", str(scores), "--gold", str(gold),
            "--grid", "0.05:0.95:0.05"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert 0 < payload["tau"] < 1
        assert payload["f1_micro"]["delta"] >= 0

    def test_compare_paired(self, runner, tmp_path, corpus_and_scores):
        gold, scores = corpus_and_scores
        result = runner.invoke(main, [
            "compare", "--scores", str(scores), "--gold", str(gold)])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["mean_predicted_cardinality"]["argmax"] == 1.0
        assert (payload["threshold"]["metrics"]["auc_micro"]
                == payload["argmax"]["metrics"]["auc_micro"])


def spec_yaml(tmp_path, budgets, seed=11):
    spec = {
        "seed": seed,
        "taxonomy": "ours11",
        "languages": [{"code": code, "budget": b} for code, b in budgets],
    }
    path = tmp_path / "spec.yaml"
    path.write_text(yaml.safe_dump(spec))
    return path


class TestGenerateSplitStats:
    def test_generate_idempotent(self, runner, tmp_path):
        spec = spec_yaml(tmp_path, [("en", 30), ("hi", 30)])
        out1, out2 = tmp_path / "c1.jsonl", tmp_path / "c2.jsonl"
        for out in (out1, out2):
            result = runner.invoke(main, [
                "generate", "--spec", str(spec), "--out", str(out)])
            assert result.exit_code == 0, result.output
        assert out1.read_bytes() == out2.read_bytes()

    def test_generate_worker_invariance(self, runner, tmp_path):
        spec = spec_yaml(tmp_path, [("en", 25), ("de", 25), ("fr", 25)])
        out1, out8 = tmp_path / "w1.jsonl", tmp_path / "w8.jsonl"
        r1 = runner.invoke(main, ["generate", "--spec", str(spec),
                                  "--out", str(out1), "--workers", "1"])
        r8 = runner.invoke(main, ["generate", "--spec", str(spec),
                                  "--out", str(out8), "--workers", "8"])
        assert r1.exit_code == 0 and r8.exit_code == 0
        assert out1.read_bytes() == out8.read_bytes()

    def test_split_and_stats(self, runner, tmp_path, ours11):
        corpus = synthetic_corpus(ours11, per_lang=30)
        path = tmp_path / "corpus.jsonl"
        write_corpus(corpus, path)
        outdir = tmp_path / "splits"
        result = runner.invoke(main, [
            "split", "--in", str(path), "--val", "5", "--test", "5",
            "--stratify", "lang", "--seed", "3", "--out-dir", str(outdir)])
        assert result.exit_code == 0, result.output
        for name in ("train", "validation", "test"):
            assert (outdir / f"{name}.jsonl").exists()
        again = tmp_path / "splits2"
        result2 = runner.invoke(main, [
            "split", "--in", str(path), "--val", "5", "--test", "5",
            "--stratify", "lang", "--seed", "3", "--out-dir", str(again)])
        assert result2.exit_code == 0
        for name in ("train", "validation", "test"):
            assert ((outdir / f"{name}.jsonl").read_bytes()
                    == (again / f"{name}.jsonl").read_bytes())

        stats = runner.invoke(main, ["stats", "--in", str(path)])
        assert stats.exit_code == 0
        payload = json.loads(stats.output)
        assert payload["n_samples"] == 90
        assert "class_shares_pct" in payload

    def test_filter_command(self, runner, tmp_path, ours11):
        corpus = synthetic_corpus(ours11, per_lang=10)
        path = tmp_path / "corpus.jsonl"
        write_corpus(corpus, path)
        out = tmp_path / "kept.jsonl"
        verdicts = tmp_path / "verdicts.jsonl"
        result = runner.invoke(main, [
            "filter", "--in", str(path), "--out", str(out),
            "--verdicts", str(verdicts)])
        assert result.exit_code == 0, result.output
        assert out.exists() and verdicts.exists()


class TestParetoCurves:
    def test_pareto_cmd(self, runner, tmp_path):
        runs = [
            {"name": "DistilBERT", "train_minutes": 14.0, "metrics": {"jaccard": 0.728}},
            {"name": "mBERT", "train_minutes": 27.4, "metrics": {"jaccard": 0.765}},
            {"name": "XLM-R-Base", "train_minutes": 31.5, "metrics": {"jaccard": 0.794}},
            {"name": "Twitter-XLM-R", "train_minutes": 69.8, "metrics": {"jaccard": 0.794}},
            {"name": "mDeBERTa-v3", "train_minutes": 69.9, "metrics": {"jaccard": 0.790}},
            {"name": "XLM-R-Large", "train_minutes": 130.8, "metrics": {"jaccard": 0.830}},
        ]
        path = tmp_path / "runs.json"
        path.write_text(json.dumps(runs))
        result = runner.invoke(main, [
            "pareto", "--runs", str(path), "--cost", "train_minutes",
            "--quality", "jaccard"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert [p["name"] for p in payload["frontier"]] == [
            "DistilBERT", "mBERT", "XLM-R-Base", "XLM-R-Large"]
        assert payload["dominated"] == ["Twitter-XLM-R", "mDeBERTa-v3"]

    def test_curves_cmd(self, runner, tmp_path, corpus_and_scores):
        gold, scores = corpus_and_scores
        out = tmp_path / "curve.csv"
        result = runner.invoke(main, [
            "curves", "--scores", str(scores), "--gold", str(gold),
            "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.read_text().startswith("# ap_micro=")


class TestConfigPrecedence:
    def test_config_supplies_defaults_flags_win(self, runner, tmp_path,
                                                corpus_and_scores):
        gold, scores = corpus_and_scores
        config = tmp_path / "cfg.yaml"
        config.write_text(yaml.safe_dump({"calibrate": {"grid": "0.4:0.6:0.1"}}))
        # config grid applies when the flag is absent
        result = runner.invoke(main, [
            "--config", str(config), "calibrate",
            "--scores", str(scores), "--gold", str(gold)])
        assert result.exit_code == 0, result.output
        assert 0.4 <= json.loads(result.output)["tau"] <= 0.6
        # explicit flag beats config
        result2 = runner.invoke(main, [
            "--config", str(config), "calibrate",
            "--scores", str(scores), "--gold", str(gold),
            "--grid", "0.9:0.9:0.1"])
        assert json.loads(result2.output)["tau"] == 0.9

    def test_help_lists_subcommands(self, runner):
        result = runner.invoke(main, ["--help"])
        for cmd in ("evaluate", "generate", "filter", "split", "stats",
                    "calibrate", "pareto", "compare", "curves"):
            assert cmd in result.output
