import json

import numpy as np
import pytest

from multiemo import (AlignmentError, Corpus, Sample, SchemaError,
                      adapt_goemotions, adapt_semeval, align_scores, binarize,
                      read_corpus, read_scores, write_corpus)
from multiemo.data import GOEMOTIONS_LABELS


def make_corpus(ours11, rows):
    samples = tuple(
        Sample(id=f"s{i}", lang=lang, text=text, labels=frozenset(labels))
        for i, (lang, text, labels) in enumerate(rows)
    )
    return Corpus(taxonomy=ours11, samples=samples)


class TestReadCorpus:
    def test_basic_parse(self, tmp_path, ours11):
        p = tmp_path / "c.jsonl"
        p.write_text(json.dumps({"id": "a1", "lang": "de", "text": "hallo",
                                 "labels": ["joy", "gratitude"]}) + "\n")
        corpus = read_corpus(p, ours11)
        assert len(corpus) == 1
        assert corpus.samples[0].labels == {"joy", "gratitude"}
        assert corpus.samples[0].script == "native"

    def test_empty_labels_rejected(self, tmp_path, ours11):
        p = tmp_path / "c.jsonl"
        p.write_text(json.dumps({"id": "a1", "lang": "de", "text": "x",
                                 "labels": []}) + "\n")
        with pytest.raises(SchemaError, match="empty label"):
            read_corpus(p, ours11)

    def test_unknown_label_rejected(self, tmp_path, ours11):
        p = tmp_path / "c.jsonl"
        p.write_text(json.dumps({"id": "a1", "lang": "en", "text": "x",
                                 "labels": ["happiness"]}) + "\n")
        with pytest.raises(SchemaError, match="happiness"):
            read_corpus(p, ours11)

    def test_malformed_line_reports_lineno(self, tmp_path, ours11):
        p = tmp_path / "c.jsonl"
        p.write_text(json.dumps({"id": "a1", "lang": "en", "text": "x",
                                 "labels": ["joy"]}) + "\n{broken\n")
        with pytest.raises(SchemaError, match=":2"):
            read_corpus(p, ours11)

    def test_round_trip(self, tmp_path, ours11):
        corpus = make_corpus(ours11, [
            ("en", "hello there", ["joy"]),
            ("ja", "こんにちは", ["gratitude", "neutral"]),
        ])
        p = tmp_path / "c.jsonl"
        write_corpus(corpus, p)
        again = read_corpus(p, ours11)
        assert again.samples == corpus.samples


class TestBinarize:
    def test_two_labels_two_ones(self, ours11):
        corpus = make_corpus(ours11, [("en", "t", ["anger", "sadness"])])
        gold = binarize(corpus)
        assert gold.values.sum() == 2
        assert gold.values[0, ours11.index("anger")] == 1

    def test_sums_match_counts(self, ours11):
        rng = np.random.default_rng(0)
        rows = []
        for _ in range(50):
            k = int(rng.integers(1, 4))
            labels = list(rng.choice(ours11.labels, size=k, replace=False))
            rows.append(("en", "t", labels))
        corpus = make_corpus(ours11, rows)
        gold = binarize(corpus)
        assert gold.values.sum(axis=1).tolist() == [len(s.labels) for s in corpus.samples]
        total = sum(len(s.labels) for s in corpus.samples)
        assert gold.values.sum() == total


class TestReadScores:
    def test_csv_column_order_independent(self, tmp_path, ours11):
        shuffled = list(ours11.labels)[::-1]
        lines = ["id," + ",".join(shuffled)]
        lines.append("a," + ",".join(str(0.1 * (i + 1) % 1) for i in range(11)))
        p = tmp_path / "s.csv"
        p.write_text("\n".join(lines) + "\n")
        sm = read_scores(p, ours11)
        # value for a label is the same regardless of file column order
        for j, lab in enumerate(shuffled):
            assert sm.values[0, ours11.index(lab)] == pytest.approx(0.1 * (j + 1) % 1)

    def test_out_of_range_rejected(self, tmp_path, ours11):
        lines = ["id," + ",".join(ours11.labels), "a," + ",".join(["1.2"] * 11)]
        p = tmp_path / "s.csv"
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError):
            read_scores(p, ours11)

    def test_duplicate_id_rejected(self, tmp_path, ours11):
        row = "a," + ",".join(["0.5"] * 11)
        p = tmp_path / "s.csv"
        p.write_text("id," + ",".join(ours11.labels) + "\n" + row + "\n" + row + "\n")
        with pytest.raises(SchemaError, match="duplicate"):
            read_scores(p, ours11)

    def test_missing_label_column(self, tmp_path, ours11):
        p = tmp_path / "s.csv"
        p.write_text("id," + ",".join(ours11.labels[:-1]) + "\n")
        with pytest.raises(SchemaError, match="missing label"):
            read_scores(p, ours11)

    def test_jsonl_scores(self, tmp_path, ours11):
        p = tmp_path / "s.jsonl"
        p.write_text(json.dumps(
            {"id": "a", "scores": {lab: 0.25 for lab in ours11.labels}}) + "\n")
        sm = read_scores(p, ours11)
        assert sm.values.shape == (1, 11)

    def test_align_scores_missing_id(self, ours11, tmp_path):
        corpus = make_corpus(ours11, [("en", "t", ["joy"]), ("en", "u", ["fear"])])
        gold = binarize(corpus)
        p = tmp_path / "s.csv"
        p.write_text("id," + ",".join(ours11.labels) + "\n"
                     + "s0," + ",".join(["0.5"] * 11) + "\n")
        scores = read_scores(p, ours11)
        with pytest.raises(AlignmentError, match="s1"):
            align_scores(gold, scores)


class TestAdapters:
    def test_goemotions_two_ids(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("some text\t2,14\tid1\nanother\t27\tid2\n")
        corpus = adapt_goemotions(p)
        assert corpus.samples[0].labels == {GOEMOTIONS_LABELS[2], GOEMOTIONS_LABELS[14]}
        assert corpus.samples[1].labels == {"neutral"}
        assert all(s.lang == "en" for s in corpus.samples)
        assert len(corpus.taxonomy) == 28

    def test_goemotions_out_of_range(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("text\t99\tid1\n")
        with pytest.raises(SchemaError, match="out of range"):
            adapt_goemotions(p)

    def _semeval_file(self, tmp_path, rows):
        header = "ID\tTweet\t" + "\t".join(
            ["anger", "anticipation", "disgust", "fear", "joy", "love",
             "optimism", "pessimism", "sadness", "surprise", "trust"])
        p = tmp_path / "se.tsv"
        p.write_text(header + "\n" + "\n".join(rows) + "\n")
        return p

    def test_semeval_parse(self, tmp_path):
        p = self._semeval_file(tmp_path, [
            "t1\tsome tweet\t1\t0\t0\t1\t0\t0\t0\t0\t0\t0\t0",
        ])
        corpus = adapt_semeval(p, lang="ar")
        assert corpus.samples[0].labels == {"anger", "fear"}
        assert corpus.samples[0].lang == "ar"

    def test_semeval_empty_gold_flagged(self, tmp_path):
        p = self._semeval_file(tmp_path, [
            "t1\ttweet\t" + "\t".join(["0"] * 11),
            "t2\ttweet two\t1" + "\t0" * 10,
        ])
        corpus = adapt_semeval(p, lang="en")
        assert corpus.samples[0].empty_gold
        assert not corpus.samples[1].empty_gold
        assert len(corpus.without_empty_gold()) == 1
        assert corpus.n_empty_gold() == 1

    def test_semeval_non_binary_rejected(self, tmp_path):
        p = self._semeval_file(tmp_path, ["t1\ttweet\t2" + "\t0" * 10])
        with pytest.raises(SchemaError, match="non-binary"):
            adapt_semeval(p, lang="en")


def test_duplicate_ids_rejected(ours11):
    s = Sample(id="a", lang="en", text="t", labels=frozenset(["joy"]))
    with pytest.raises(SchemaError, match="duplicate"):
        Corpus(taxonomy=ours11, samples=(s, s))
