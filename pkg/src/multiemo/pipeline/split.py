"""Deterministic language-stratified train/validation/test splitting."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..data import Corpus
from ..errors import SchemaError
from .genspec import derive_seed


@dataclass(frozen=True)
class SplitSpec:
    validation_per_language: int
    test_per_language: int
    stratify_by: str = "language"

    def __post_init__(self):
        if self.validation_per_language < 0 or self.test_per_language < 0:
            raise SchemaError("split counts must be non-negative")
        if self.stratify_by != "language":
            raise SchemaError("only language stratification is supported")

    @classmethod
    def benchmark_default(cls) -> "SplitSpec":
        """500 validation and 500 test rows per language."""
        return cls(validation_per_language=500, test_per_language=500)


def stratified_split(corpus: Corpus, spec: SplitSpec, seed: int) -> tuple[Corpus, Corpus, Corpus]:
    """Split into (train, validation, test), stratified by language.

    Within each language a seeded shuffle assigns exactly the requested
    validation and test counts; the remainder goes to train. Sample ids
    are disjoint across splits, original line order is preserved inside
    each split, and identical seeds give identical splits.
    """
    by_lang: dict[str, list[int]] = {}
    for i, s in enumerate(corpus.samples):
        by_lang.setdefault(s.lang, []).append(i)

    needed = spec.validation_per_language + spec.test_per_language
    assign = {}
    for lang in sorted(by_lang):
        rows = by_lang[lang]
        if len(rows) < needed:
            raise SchemaError(
                f"language {lang!r} has {len(rows)} rows, "
                f"fewer than the {needed} needed for validation+test"
            )
        rng = np.random.Generator(np.random.PCG64(derive_seed(seed, "split", lang)))
        shuffled = [rows[j] for j in rng.permutation(len(rows))]
        for i in shuffled[: spec.validation_per_language]:
            assign[i] = "validation"
        for i in shuffled[spec.validation_per_language:needed]:
            assign[i] = "test"
        for i in shuffled[needed:]:
            assign[i] = "train"

    def subset(which):
        samples = tuple(s for i, s in enumerate(corpus.samples) if assign[i] == which)
        return replace(corpus, samples=samples, split=which)

    return subset("train"), subset("validation"), subset("test")
