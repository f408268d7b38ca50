"""Emotion taxonomies, cross-taxonomy label mappings, and label-space views.

A taxonomy is an ordered list of lowercase label names; its order defines
the column index of every matrix built against it. Mappings collapse a
source taxonomy onto a target one (many-to-one, with explicit drops), and
views restrict evaluation to either the full projected target space or the
exact-string-match intersection of two taxonomies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import AlignmentError, SchemaError

DROP_MARKER = "__DROP__"


def normalize_label(raw: str) -> str:
    """Canonical label form: trimmed and lowercased."""
    return raw.strip().lower()


@dataclass(frozen=True)
class EmotionTaxonomy:
    """Ordered, immutable label space."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise SchemaError(f"taxonomy {self.name!r} has no labels")
        seen = set()
        for lab in self.labels:
            if not lab:
                raise SchemaError(f"taxonomy {self.name!r} contains an empty label")
            if lab != normalize_label(lab):
                raise SchemaError(
                    f"taxonomy {self.name!r}: label {lab!r} is not trimmed lowercase"
                )
            if lab in seen:
                raise SchemaError(f"taxonomy {self.name!r}: duplicate label {lab!r}")
            seen.add(lab)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return normalize_label(label) in self.labels

    def index(self, label: str) -> int:
        lab = normalize_label(label)
        try:
            return self.labels.index(lab)
        except ValueError:
            raise SchemaError(f"label {label!r} not in taxonomy {self.name!r}") from None

    def indices(self, labels) -> list[int]:
        return [self.index(lab) for lab in labels]


def load_taxonomy(path, name: str | None = None) -> EmotionTaxonomy:
    """Load a taxonomy from a one-label-per-line text file or a JSON list.

    Blank lines are ignored; file order is preserved.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        raw = json.loads(text)
        if not isinstance(raw, list):
            raise SchemaError(f"{path}: JSON taxonomy must be a list of strings")
        entries = [str(x) for x in raw]
        if any(not normalize_label(e) for e in entries):
            raise SchemaError(f"{path}: empty label in taxonomy list")
    else:
        entries = [line for line in text.splitlines() if line.strip()]
    labels = tuple(normalize_label(e) for e in entries)
    if not labels:
        raise SchemaError(f"{path}: taxonomy file is empty")
    return EmotionTaxonomy(name=name or path.stem, labels=labels)


@dataclass(frozen=True)
class LabelMapping:
    """Total many-to-one map from a source taxonomy onto a target taxonomy."""

    source: EmotionTaxonomy
    target: EmotionTaxonomy
    pairs: dict[str, str]
    dropped: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        mentioned = set(self.pairs) | set(self.dropped)
        overlap = set(self.pairs) & set(self.dropped)
        if overlap:
            raise SchemaError(f"labels both mapped and dropped: {sorted(overlap)}")
        missing = set(self.source.labels) - mentioned
        if missing:
            raise SchemaError(f"source labels unmentioned in mapping: {sorted(missing)}")
        extra = mentioned - set(self.source.labels)
        if extra:
            raise SchemaError(f"unknown source labels in mapping: {sorted(extra)}")
        for src, tgt in self.pairs.items():
            if tgt not in self.target.labels:
                raise SchemaError(f"mapping {src!r} -> unknown target label {tgt!r}")

    def matrix(self) -> np.ndarray:
        """Boolean (|source| x |target|) projection matrix."""
        m = np.zeros((len(self.source), len(self.target)), dtype=bool)
        for src, tgt in self.pairs.items():
            m[self.source.index(src), self.target.index(tgt)] = True
        return m

    @classmethod
    def identity(cls, taxonomy: EmotionTaxonomy) -> "LabelMapping":
        return cls(taxonomy, taxonomy, {lab: lab for lab in taxonomy.labels})


def load_mapping(path, source: EmotionTaxonomy, target: EmotionTaxonomy) -> LabelMapping:
    """Load a TSV mapping file: `source<TAB>target` or `source<TAB>__DROP__`.

    The mapping must be total over the source taxonomy; an unmentioned or
    twice-mapped source label is an error.
    """
    pairs: dict[str, str] = {}
    dropped: set[str] = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise SchemaError(f"{path}:{lineno}: expected `source<TAB>target`")
        src = normalize_label(parts[0])
        tgt = parts[1].strip()
        if src not in source.labels:
            raise SchemaError(f"{path}:{lineno}: unknown source label {src!r}")
        if src in pairs or src in dropped:
            raise SchemaError(f"{path}:{lineno}: source label {src!r} mapped twice")
        if tgt == DROP_MARKER:
            dropped.add(src)
        else:
            tgt = normalize_label(tgt)
            if tgt not in target.labels:
                raise SchemaError(f"{path}:{lineno}: unknown target label {tgt!r}")
            pairs[src] = tgt
    return LabelMapping(source=source, target=target, pairs=pairs, dropped=frozenset(dropped))


def project_gold(gold: np.ndarray, mapping: LabelMapping) -> tuple[np.ndarray, np.ndarray]:
    """Collapse a gold matrix over the source taxonomy onto the target one.

    A target cell is 1 iff any source label mapping to it is 1; dropped
    source labels contribute nothing. All rows are retained; the second
    return value flags rows whose projected gold is all-zero.
    """
    gold = np.asarray(gold)
    if gold.ndim != 2 or gold.shape[1] != len(mapping.source):
        raise AlignmentError(
            f"gold has {gold.shape[1] if gold.ndim == 2 else '?'} columns, "
            f"source taxonomy {mapping.source.name!r} has {len(mapping.source)}"
        )
    projected = (gold.astype(bool) @ mapping.matrix()).astype(np.int8)
    all_zero = projected.sum(axis=1) == 0
    return projected, all_zero


def intersect_taxonomies(a: EmotionTaxonomy, b: EmotionTaxonomy) -> list[str]:
    """Labels present in both taxonomies by exact (normalized) string match, in a's order."""
    b_set = set(b.labels)
    return [lab for lab in a.labels if lab in b_set]


@dataclass(frozen=True)
class LabelSpaceView:
    """Restriction of evaluation to a label subset and the rows it supports."""

    kind: str  # "projected" or "intersection"
    effective_labels: tuple[str, ...]
    row_filter: str

    def __post_init__(self):
        if self.kind not in ("projected", "intersection"):
            raise SchemaError(f"unknown view kind {self.kind!r}")
        if not self.effective_labels:
            raise SchemaError("view has no effective labels")


def projected_view(target: EmotionTaxonomy) -> LabelSpaceView:
    return LabelSpaceView(
        kind="projected",
        effective_labels=target.labels,
        row_filter="all rows retained; all-zero projected gold rows flagged",
    )


def intersection_view(target: EmotionTaxonomy, benchmark: EmotionTaxonomy) -> LabelSpaceView:
    shared = intersect_taxonomies(target, benchmark)
    if not shared:
        raise SchemaError(
            f"taxonomies {target.name!r} and {benchmark.name!r} share no labels"
        )
    return LabelSpaceView(
        kind="intersection",
        effective_labels=tuple(shared),
        row_filter="rows whose gold labels all fall outside the shared set are dropped",
    )


def apply_view(gold, scores, view: LabelSpaceView):
    """Apply a label-space view to a row-aligned (GoldMatrix, ScoreMatrix) pair.

    Intersection views restrict both matrices to the effective labels and
    drop rows whose restricted gold is all-zero; projected views only
    restrict score columns to the target taxonomy. Returns the filtered
    pair plus the kept-row index list for traceability.
    """
    from .data import GoldMatrix, ScoreMatrix  # local import avoids a module cycle

    if tuple(gold.ids) != tuple(scores.ids):
        raise AlignmentError("gold and scores are not row-aligned by id")

    eff = list(view.effective_labels)
    sub_tax = EmotionTaxonomy(name=f"{view.kind}-view", labels=tuple(eff))

    g_cols = gold.taxonomy.indices(eff)
    s_cols = scores.taxonomy.indices(eff)
    g_vals = gold.values[:, g_cols]
    s_vals = scores.values[:, s_cols]

    if view.kind == "intersection":
        keep = np.flatnonzero(g_vals.sum(axis=1) > 0)
    else:
        keep = np.arange(gold.values.shape[0])

    kept_ids = tuple(gold.ids[i] for i in keep)
    new_gold = GoldMatrix(ids=kept_ids, taxonomy=sub_tax, values=g_vals[keep])
    new_scores = ScoreMatrix(ids=kept_ids, taxonomy=sub_tax, values=s_vals[keep])
    return new_gold, new_scores, keep.tolist()


class LabelProjector(BaseEstimator, TransformerMixin):
    """sklearn-style transformer collapsing gold matrices across taxonomies.

    `transform` maps an (n_samples, n_source_labels) binary matrix to the
    target taxonomy; rows whose projection is all-zero are recorded in
    `all_zero_rows_` after each transform.
    """

    def __init__(self, mapping: LabelMapping | None = None):
        self.mapping = mapping

    def fit(self, X=None, y=None):
        if self.mapping is None:
            raise SchemaError("LabelProjector requires a mapping")
        self.projection_matrix_ = self.mapping.matrix()
        return self

    def transform(self, X):
        if not hasattr(self, "projection_matrix_"):
            self.fit()
        projected, flags = project_gold(X, self.mapping)
        self.all_zero_rows_ = np.flatnonzero(flags).tolist()
        return projected
