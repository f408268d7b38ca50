"""Synthetic corpus construction: label sampling, prompting, generation,
quality filtering, splitting, and statistics."""

from .genspec import (DEFAULT_CARDINALITY_MIX, DEFAULT_LABEL_MARGINALS,
                      GenerationSpec, LanguageSpec, derive_seed,
                      sample_label_set, sample_label_sets)
from .prompts import render_prompt
from .generate import HttpGenerator, MockGenerator, generate_batch
from .filters import (FilterVerdict, MinHashIndex, NearDuplicateFilter,
                      filter_label_consistency, filter_lexical_diversity,
                      filter_near_duplicates, lexical_diversity)
from .split import SplitSpec, stratified_split
from .stats import CorpusStats, corpus_stats

__all__ = [
    "GenerationSpec", "LanguageSpec", "sample_label_set", "sample_label_sets",
    "derive_seed", "DEFAULT_CARDINALITY_MIX", "DEFAULT_LABEL_MARGINALS",
    "render_prompt", "MockGenerator", "HttpGenerator", "generate_batch",
    "FilterVerdict", "filter_lexical_diversity", "lexical_diversity",
    "filter_near_duplicates", "filter_label_consistency", "MinHashIndex",
    "NearDuplicateFilter", "SplitSpec", "stratified_split",
    "CorpusStats", "corpus_stats",
]
