import numpy as np
import pytest

from multiemo import (EmotionTaxonomy, GoldMatrix, LabelProjector, SchemaError,
                      ScoreMatrix, apply_view, builtin_mapping,
                      intersect_taxonomies, intersection_view, load_mapping,
                      load_taxonomy, project_gold, projected_view)
from multiemo.errors import AlignmentError
from multiemo.taxonomy import LabelMapping


def test_load_taxonomy_preserves_order(tmp_path, ours11):
    p = tmp_path / "tax.txt"
    p.write_text("\n".join(ours11.labels) + "\n")
    tax = load_taxonomy(p)
    assert tax.labels == ours11.labels
    assert len(tax) == 11


def test_load_taxonomy_duplicate(tmp_path):
    p = tmp_path / "tax.txt"
    p.write_text("anger\nanger\n")
    with pytest.raises(SchemaError, match="duplicate"):
        load_taxonomy(p)


def test_load_taxonomy_empty_file(tmp_path):
    p = tmp_path / "tax.txt"
    p.write_text("\n\n")
    with pytest.raises(SchemaError, match="empty"):
        load_taxonomy(p)


def test_load_taxonomy_normalizes_case(tmp_path):
    p = tmp_path / "tax.txt"
    p.write_text("Anger \n joy\n")
    assert load_taxonomy(p).labels == ("anger", "joy")


def test_builtin_sizes(ours11, goemotions28, semeval11):
    assert len(ours11) == 11
    assert len(goemotions28) == 28
    assert len(semeval11) == 11


class TestMapping:
    def test_goemotions_mapping_values(self):
        mapping = builtin_mapping("goemotions_to_ours")
        assert mapping.pairs["annoyance"] == "anger"
        assert mapping.pairs["anger"] == "anger"
        assert not mapping.dropped

    def test_semeval_drops_anticipation(self):
        mapping = builtin_mapping("semeval_to_ours")
        assert "anticipation" in mapping.dropped
        assert mapping.pairs["trust"] == "love"

    def test_totality(self):
        for name in ("goemotions_to_ours", "semeval_to_ours"):
            mapping = builtin_mapping(name)
            assert len(mapping.pairs) + len(mapping.dropped) == len(mapping.source)

    def test_unmentioned_source_label_rejected(self, tmp_path, goemotions28, ours11):
        lines = [f"{lab}\tjoy" for lab in goemotions28.labels if lab != "grief"]
        p = tmp_path / "map.tsv"
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError, match="grief"):
            load_mapping(p, goemotions28, ours11)

    def test_source_mapped_twice_rejected(self, tmp_path, goemotions28, ours11):
        lines = [f"{lab}\tjoy" for lab in goemotions28.labels] + ["anger\tanger"]
        p = tmp_path / "map.tsv"
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError, match="twice"):
            load_mapping(p, goemotions28, ours11)

    def test_unknown_target_rejected(self, tmp_path, goemotions28, ours11):
        lines = [f"{lab}\tjoy" for lab in goemotions28.labels[:-1]]
        lines.append(f"{goemotions28.labels[-1]}\thappiness")
        p = tmp_path / "map.tsv"
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError, match="happiness"):
            load_mapping(p, goemotions28, ours11)


class TestProjection:
    def test_annoyance_projects_to_anger(self, goemotions28, ours11):
        mapping = builtin_mapping("goemotions_to_ours")
        row = np.zeros((1, 28), dtype=int)
        row[0, goemotions28.index("annoyance")] = 1
        projected, flags = project_gold(row, mapping)
        assert projected[0, ours11.index("anger")] == 1
        assert projected[0].sum() == 1
        assert not flags[0]

    def test_dropped_only_row_flagged(self, semeval11, ours11):
        mapping = builtin_mapping("semeval_to_ours")
        row = np.zeros((1, 11), dtype=int)
        row[0, semeval11.index("anticipation")] = 1
        projected, flags = project_gold(row, mapping)
        assert projected.sum() == 0
        assert flags[0]

    def test_identity_mapping(self, ours11):
        mapping = LabelMapping.identity(ours11)
        rng = np.random.default_rng(0)
        gold = (rng.random((20, 11)) < 0.3).astype(int)
        projected, _ = project_gold(gold, mapping)
        assert np.array_equal(projected, gold)

    def test_column_mismatch(self, ours11):
        mapping = LabelMapping.identity(ours11)
        with pytest.raises(AlignmentError):
            project_gold(np.zeros((2, 5)), mapping)

    def test_monotone(self, goemotions28):
        mapping = builtin_mapping("goemotions_to_ours")
        rng = np.random.default_rng(1)
        for _ in range(30):
            gold = (rng.random((5, 28)) < 0.2).astype(int)
            base, _ = project_gold(gold, mapping)
            i, j = rng.integers(0, 5), rng.integers(0, 28)
            richer = gold.copy()
            richer[i, j] = 1
            more, _ = project_gold(richer, mapping)
            assert (more >= base).all()

    def test_labelprojector_estimator(self, goemotions28):
        mapping = builtin_mapping("goemotions_to_ours")
        proj = LabelProjector(mapping=mapping).fit()
        assert proj.get_params()["mapping"] is mapping
        row = np.zeros((2, 28), dtype=int)
        row[0, goemotions28.index("grief")] = 1
        out = proj.transform(row)
        assert out[0].sum() == 1
        assert proj.all_zero_rows_ == [1]


class TestIntersection:
    def test_goemotions_nine_shared(self, ours11, goemotions28):
        shared = intersect_taxonomies(ours11, goemotions28)
        assert shared == ["anger", "disgust", "fear", "gratitude", "joy",
                          "love", "neutral", "sadness", "surprise"]

    def test_semeval_seven_shared(self, ours11, semeval11):
        shared = intersect_taxonomies(ours11, semeval11)
        assert shared == ["anger", "disgust", "fear", "joy", "love",
                          "sadness", "surprise"]

    def test_self_intersection(self, ours11):
        assert tuple(intersect_taxonomies(ours11, ours11)) == ours11.labels


class TestApplyView:
    def _toy(self):
        tax_a = EmotionTaxonomy("a", ("x", "y", "z"))
        tax_b = EmotionTaxonomy("b", ("x", "y", "w"))
        gold = GoldMatrix(ids=("r0", "r1", "r2"), taxonomy=tax_a,
                          values=np.array([[1, 0, 0], [0, 0, 1], [0, 1, 1]]))
        scores = ScoreMatrix(ids=("r0", "r1", "r2"), taxonomy=tax_b,
                             values=np.full((3, 3), 0.5))
        return tax_a, tax_b, gold, scores

    def test_intersection_drops_outside_rows(self):
        tax_a, tax_b, gold, scores = self._toy()
        view = intersection_view(tax_a, tax_b)
        assert view.effective_labels == ("x", "y")
        g2, s2, kept = apply_view(gold, scores, view)
        # row r1's gold (z only) lies entirely outside the shared labels
        assert kept == [0, 2]
        assert g2.values.shape == (2, 2)
        assert s2.values.shape == (2, 2)
        assert g2.ids == ("r0", "r2")

    def test_full_taxonomy_view_is_noop(self, ours11):
        gold = GoldMatrix(ids=("a", "b"), taxonomy=ours11,
                          values=np.eye(11, dtype=int)[:2])
        scores = ScoreMatrix(ids=("a", "b"), taxonomy=ours11,
                             values=np.full((2, 11), 0.4))
        view = intersection_view(ours11, ours11)
        g2, s2, kept = apply_view(gold, scores, view)
        assert kept == [0, 1]
        assert np.array_equal(g2.values, gold.values)

    def test_never_grows(self):
        tax_a, tax_b, gold, scores = self._toy()
        scores_a = ScoreMatrix(ids=scores.ids, taxonomy=tax_a,
                               values=scores.values)
        cases = ((intersection_view(tax_a, tax_b), scores),
                 (projected_view(tax_a), scores_a))
        for view, sm in cases:
            g2, s2, _ = apply_view(gold, sm, view)
            assert g2.values.shape[0] <= gold.values.shape[0]
            assert g2.values.shape[1] <= gold.values.shape[1]
            assert s2.values.shape == g2.values.shape

    def test_misaligned_ids_rejected(self):
        tax_a, tax_b, gold, scores = self._toy()
        bad = ScoreMatrix(ids=("r0", "r1", "OTHER"), taxonomy=tax_b,
                          values=scores.values)
        with pytest.raises(AlignmentError):
            apply_view(gold, bad, intersection_view(tax_a, tax_b))


def test_projection_restriction_commutes(ours11, goemotions28):
    # project then restrict to shared labels == restrict source to the
    # preimage of shared labels then project
    mapping = builtin_mapping("goemotions_to_ours")
    shared = intersect_taxonomies(ours11, goemotions28)
    shared_cols = ours11.indices(shared)
    rng = np.random.default_rng(3)
    gold = (rng.random((40, 28)) < 0.2).astype(int)
    projected, _ = project_gold(gold, mapping)
    route_a = projected[:, shared_cols]

    keep_src = [mapping.source.index(s) for s, t in mapping.pairs.items() if t in shared]
    restricted = np.zeros_like(gold)
    restricted[:, keep_src] = gold[:, keep_src]
    route_b, _ = project_gold(restricted, mapping)
    assert np.array_equal(route_a, route_b[:, shared_cols])
