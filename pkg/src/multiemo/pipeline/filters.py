"""Quality filters: lexical diversity, near-duplicate detection, and
label-text consistency.

Near-duplicate detection uses MinHash over character shingles with LSH
banding to propose candidate pairs, then verifies every candidate with
exact shingle-set Jaccard, so flagged pairs are never false positives of
the sketch. Hashing is fully seeded and deterministic across runs.
"""

from __future__ import annotations

import re
import unicodedata
import zlib
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..errors import SchemaError

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

DEFAULT_MIN_TTR = 0.4
DEFAULT_MIN_TOKENS = 20
DEFAULT_SHINGLE_SIZE = 5
DEFAULT_JACCARD_THRESHOLD = 0.85
DEFAULT_NUM_PERM = 128
DEFAULT_BANDS = 32
DEFAULT_HASH_SEED = 0x5EED


@dataclass(frozen=True)
class FilterVerdict:
    sample_id: str
    passed: bool
    reasons: tuple[dict, ...] = ()

    def __post_init__(self):
        if self.passed != (len(self.reasons) == 0):
            raise SchemaError("verdict passed flag inconsistent with reasons")

    def to_dict(self) -> dict:
        return {"id": self.sample_id, "passed": self.passed,
                "reasons": list(self.reasons)}


def lexical_diversity(text: str) -> tuple[float, int]:
    """(type-token ratio, token count); tokens split on whitespace and punctuation."""
    tokens = _TOKEN_RE.findall(text.casefold())
    if not tokens:
        return 0.0, 0
    return len(set(tokens)) / len(tokens), len(tokens)


def filter_lexical_diversity(text: str, min_ttr: float = DEFAULT_MIN_TTR,
                             min_tokens: int = DEFAULT_MIN_TOKENS) -> tuple[bool, float]:
    """Fail iff the text has >= min_tokens tokens and TTR below min_ttr."""
    if not text:
        raise SchemaError("text must be non-empty")
    ttr, n_tokens = lexical_diversity(text)
    passed = n_tokens < min_tokens or ttr >= min_ttr
    return passed, ttr


def _normalize_for_hashing(text: str) -> str:
    return unicodedata.normalize("NFC", text).casefold()


def char_shingles(text: str, k: int = DEFAULT_SHINGLE_SIZE) -> frozenset[str]:
    """Set of length-k character shingles of the normalized text."""
    norm = _normalize_for_hashing(text)
    if len(norm) <= k:
        return frozenset((norm,))
    return frozenset(norm[i:i + k] for i in range(len(norm) - k + 1))


def exact_jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


_MERSENNE = np.uint64((1 << 61) - 1)


class MinHasher:
    """Seeded MinHash signatures over character shingles."""

    def __init__(self, num_perm: int = DEFAULT_NUM_PERM,
                 shingle_size: int = DEFAULT_SHINGLE_SIZE,
                 seed: int = DEFAULT_HASH_SEED):
        self.num_perm = num_perm
        self.shingle_size = shingle_size
        rng = np.random.Generator(np.random.PCG64(seed))
        # a < 2^30 keeps a*h + b below 2^63 for 32-bit base hashes
        self._a = rng.integers(1, 1 << 30, size=num_perm, dtype=np.uint64)
        self._b = rng.integers(0, int(_MERSENNE), size=num_perm, dtype=np.uint64)

    def signature(self, shingles: frozenset[str]) -> np.ndarray:
        if not shingles:
            return np.full(self.num_perm, int(_MERSENNE), dtype=np.uint64)
        base = np.fromiter(
            (zlib.crc32(s.encode("utf-8")) for s in sorted(shingles)),
            dtype=np.uint64, count=len(shingles),
        )
        # (k, num_perm) universal hashes, min over shingles
        hashed = (base[:, None] * self._a[None, :] + self._b[None, :]) % _MERSENNE
        return hashed.min(axis=0)


class MinHashIndex:
    """Incremental LSH index over kept documents.

    `check_and_add` returns the id of the earliest already-kept document
    whose exact shingle Jaccard reaches the threshold, or None (in which
    case the document is added to the index).
    """

    def __init__(self, shingle_size: int = DEFAULT_SHINGLE_SIZE,
                 threshold: float = DEFAULT_JACCARD_THRESHOLD,
                 num_perm: int = DEFAULT_NUM_PERM, bands: int = DEFAULT_BANDS,
                 seed: int = DEFAULT_HASH_SEED):
        if num_perm % bands:
            raise SchemaError("num_perm must be divisible by bands")
        self.threshold = threshold
        self.rows = num_perm // bands
        self.bands = bands
        self.hasher = MinHasher(num_perm=num_perm, shingle_size=shingle_size, seed=seed)
        self._buckets: dict[tuple, list[str]] = {}
        self._shingles: dict[str, frozenset] = {}
        self._order: dict[str, int] = {}

    def _band_keys(self, sig: np.ndarray):
        for b in range(self.bands):
            chunk = sig[b * self.rows:(b + 1) * self.rows]
            yield (b, chunk.tobytes())

    def check_and_add(self, doc_id: str, text: str) -> str | None:
        shingles = char_shingles(text, self.hasher.shingle_size)
        sig = self.hasher.signature(shingles)
        candidates: set[str] = set()
        keys = list(self._band_keys(sig))
        for key in keys:
            candidates.update(self._buckets.get(key, ()))
        matches = [
            cid for cid in candidates
            if exact_jaccard(shingles, self._shingles[cid]) >= self.threshold
        ]
        if matches:
            return min(matches, key=self._order.__getitem__)
        self._shingles[doc_id] = shingles
        self._order[doc_id] = len(self._order)
        for key in keys:
            self._buckets.setdefault(key, []).append(doc_id)
        return None


def filter_near_duplicates(items, shingle_size: int = DEFAULT_SHINGLE_SIZE,
                           jaccard_threshold: float = DEFAULT_JACCARD_THRESHOLD,
                           num_perm: int = DEFAULT_NUM_PERM,
                           bands: int = DEFAULT_BANDS,
                           seed: int = DEFAULT_HASH_SEED) -> list[FilterVerdict]:
    """Flag near-duplicates in a sequence of (id, text) pairs or Samples.

    The later item (by input order) is marked a duplicate of the earliest
    kept match; flagged items are not added to the index, so the kept set
    contains no pair at or above the threshold.
    """
    index = MinHashIndex(shingle_size=shingle_size, threshold=jaccard_threshold,
                         num_perm=num_perm, bands=bands, seed=seed)
    verdicts = []
    for item in items:
        if hasattr(item, "id"):
            doc_id, text = item.id, item.text
        else:
            doc_id, text = item
        match = index.check_and_add(doc_id, text)
        if match is None:
            verdicts.append(FilterVerdict(doc_id, True))
        else:
            verdicts.append(FilterVerdict(
                doc_id, False,
                ({"kind": "near_duplicate", "of_id": match},),
            ))
    return verdicts


def filter_label_consistency(sample, aux_scorer, min_score: float = 0.5,
                             retries: int = 2) -> tuple[bool, dict[str, float]]:
    """Fail iff any gold label scores below min_score under the auxiliary scorer.

    `aux_scorer(text)` must return a per-label score map; transient scorer
    failures are retried.
    """
    last_exc = None
    for _ in range(retries + 1):
        try:
            scores = aux_scorer(sample.text)
            break
        except Exception as exc:  # scorer is an external service
            last_exc = exc
    else:
        raise SchemaError(f"auxiliary scorer failed after {retries + 1} attempts: {last_exc}")
    failing = {lab: scores[lab] for lab in sample.labels if scores.get(lab, 0.0) < min_score}
    return not failing, dict(scores)


class NearDuplicateFilter(BaseEstimator, TransformerMixin):
    """sklearn-style transformer dropping near-duplicate texts.

    `transform` takes a sequence of (id, text) pairs (or Samples) and
    returns the kept subset; verdicts for the full input are available as
    `verdicts_` afterwards.
    """

    def __init__(self, shingle_size: int = DEFAULT_SHINGLE_SIZE,
                 jaccard_threshold: float = DEFAULT_JACCARD_THRESHOLD,
                 num_perm: int = DEFAULT_NUM_PERM, bands: int = DEFAULT_BANDS,
                 seed: int = DEFAULT_HASH_SEED):
        self.shingle_size = shingle_size
        self.jaccard_threshold = jaccard_threshold
        self.num_perm = num_perm
        self.bands = bands
        self.seed = seed

    def fit(self, X=None, y=None):
        return self

    def transform(self, X):
        items = list(X)
        self.verdicts_ = filter_near_duplicates(
            items, shingle_size=self.shingle_size,
            jaccard_threshold=self.jaccard_threshold,
            num_perm=self.num_perm, bands=self.bands, seed=self.seed)
        passed = {v.sample_id for v in self.verdicts_ if v.passed}
        return [it for it in items
                if (it.id if hasattr(it, "id") else it[0]) in passed]
