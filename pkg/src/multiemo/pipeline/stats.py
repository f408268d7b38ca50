"""Corpus summary statistics: class distribution, label cardinality,
text-length quantiles, and per-language romanized shares.

Accepts any iterable of samples so multi-hundred-thousand-row corpora can
be summarized without materializing a Corpus object.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

from ..data import Corpus, language_registry
from ..errors import SchemaError
from ..taxonomy import EmotionTaxonomy


@dataclass(frozen=True)
class CorpusStats:
    n_samples: int
    n_label_instances: int
    class_counts: dict[str, int]
    class_shares: dict[str, float]
    cardinality_histogram: dict[int, int]
    cardinality_mean: float
    per_language_counts: dict[str, int]
    length_median: int
    length_p95: int
    romanized_share: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "n_label_instances": self.n_label_instances,
            "class_counts": self.class_counts,
            "class_shares_pct": {k: round(100 * v, 2) for k, v in self.class_shares.items()},
            "cardinality_histogram": self.cardinality_histogram,
            "cardinality_mean": self.cardinality_mean,
            "per_language_counts": self.per_language_counts,
            "text_length": {"median": self.length_median, "p95": self.length_p95},
            "romanized_share": self.romanized_share,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)


def _lower_median(sorted_vals: list[int]) -> int:
    return sorted_vals[(len(sorted_vals) - 1) // 2]


def _nearest_rank_p95(sorted_vals: list[int]) -> int:
    rank = math.ceil(0.95 * len(sorted_vals))  # 1-indexed nearest rank
    return sorted_vals[rank - 1]


def corpus_stats(samples, taxonomy: EmotionTaxonomy | None = None) -> CorpusStats:
    """Summarize a Corpus or an iterable of samples.

    Shares are count / n_samples (they exceed 100% in total for a
    multi-label corpus); median is the lower median, p95 nearest-rank,
    both in characters.
    """
    if isinstance(samples, Corpus):
        taxonomy = samples.taxonomy
        samples = samples.samples

    class_counts: Counter = Counter()
    card_hist: Counter = Counter()
    lang_counts: Counter = Counter()
    latin_counts: Counter = Counter()
    lengths: list[int] = []
    n = 0
    for s in samples:
        n += 1
        class_counts.update(s.labels)
        card_hist[len(s.labels)] += 1
        lang_counts[s.lang] += 1
        if s.script == "latin":
            latin_counts[s.lang] += 1
        lengths.append(len(s.text))
    if n == 0:
        raise SchemaError("cannot summarize an empty corpus")

    labels = taxonomy.labels if taxonomy is not None else tuple(sorted(class_counts))
    counts = {lab: class_counts.get(lab, 0) for lab in labels}
    total_instances = sum(class_counts.values())
    lengths.sort()

    eligible = {code for code, (_, roman) in language_registry().items() if roman}
    romanized = {
        lang: latin_counts.get(lang, 0) / lang_counts[lang]
        for lang in sorted(lang_counts)
        if lang in eligible
    }

    return CorpusStats(
        n_samples=n,
        n_label_instances=total_instances,
        class_counts=counts,
        class_shares={lab: c / n for lab, c in counts.items()},
        cardinality_histogram=dict(sorted(card_hist.items())),
        cardinality_mean=total_instances / n,
        per_language_counts=dict(sorted(lang_counts.items())),
        length_median=_lower_median(lengths),
        length_p95=_nearest_rank_p95(lengths),
        romanized_share=romanized,
    )
