"""Corpus, gold-label, and score I/O in bit-stable formats.

Native corpus format is JSONL (one object per line: id, lang, text,
labels, optional script). Scores come in as JSONL or headered CSV.
Adapters convert the two public benchmark layouts into the common model.
"""

from __future__ import annotations

import csv
import json
import unicodedata
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import AlignmentError, SchemaError
from .taxonomy import EmotionTaxonomy, load_taxonomy, normalize_label
from .validation import check_binary, check_unit_interval

VALID_SCRIPTS = ("native", "latin")


def _data_path(*parts) -> Path:
    return Path(resources.files("multiemo").joinpath("data", *parts))


def builtin_taxonomy(name: str) -> EmotionTaxonomy:
    """Load one of the shipped taxonomies: ours11, goemotions28, semeval11."""
    return load_taxonomy(_data_path("taxonomies", f"{name}.txt"), name=name)


def builtin_mapping(name: str):
    """Load one of the shipped mappings: goemotions_to_ours, semeval_to_ours."""
    from .taxonomy import load_mapping

    sources = {"goemotions_to_ours": "goemotions28", "semeval_to_ours": "semeval11"}
    if name not in sources:
        raise SchemaError(f"unknown builtin mapping {name!r}")
    return load_mapping(_data_path("mappings", f"{name}.tsv"),
                        source=builtin_taxonomy(sources[name]),
                        target=builtin_taxonomy("ours11"))


def language_registry() -> dict[str, tuple[str, bool]]:
    """code -> (display name, romanization-eligible) for the 23 supported languages."""
    registry = {}
    for line in _data_path("languages.tsv").read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        code, name, roman = line.split("\t")
        registry[code] = (name, roman == "1")
    return registry


@dataclass(frozen=True)
class Sample:
    id: str
    lang: str
    text: str
    labels: frozenset[str]
    script: str = "native"
    empty_gold: bool = False

    def __post_init__(self):
        if not self.id:
            raise SchemaError("sample id must be non-empty")
        if self.script not in VALID_SCRIPTS:
            raise SchemaError(f"sample {self.id}: invalid script {self.script!r}")
        if not self.labels and not self.empty_gold:
            raise SchemaError(f"sample {self.id}: empty label set")


@dataclass(frozen=True)
class Corpus:
    taxonomy: EmotionTaxonomy
    samples: tuple[Sample, ...]
    split: str = "unsplit"

    def __post_init__(self):
        if self.split not in ("train", "validation", "test", "unsplit"):
            raise SchemaError(f"invalid split {self.split!r}")
        seen = set()
        for s in self.samples:
            if s.id in seen:
                raise SchemaError(f"duplicate sample id {s.id!r}")
            seen.add(s.id)
            unknown = s.labels - set(self.taxonomy.labels)
            if unknown:
                raise SchemaError(
                    f"sample {s.id}: unknown label(s) {sorted(unknown)} "
                    f"for taxonomy {self.taxonomy.name!r}"
                )

    def __len__(self) -> int:
        return len(self.samples)

    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.samples)

    def languages(self) -> list[str]:
        return [s.lang for s in self.samples]

    def without_empty_gold(self) -> "Corpus":
        kept = tuple(s for s in self.samples if not s.empty_gold)
        return replace(self, samples=kept)

    def n_empty_gold(self) -> int:
        return sum(1 for s in self.samples if s.empty_gold)


@dataclass(frozen=True)
class GoldMatrix:
    ids: tuple[str, ...]
    taxonomy: EmotionTaxonomy
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = check_binary(self.values, "gold")
        object.__setattr__(self, "values", vals)
        self._check_shape()

    def _check_shape(self):
        n, l = self.values.shape
        if n != len(self.ids):
            raise AlignmentError(f"gold has {n} rows but {len(self.ids)} ids")
        if l != len(self.taxonomy):
            raise AlignmentError(
                f"gold has {l} columns but taxonomy {self.taxonomy.name!r} "
                f"has {len(self.taxonomy)} labels"
            )


@dataclass(frozen=True)
class ScoreMatrix:
    ids: tuple[str, ...]
    taxonomy: EmotionTaxonomy
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = check_unit_interval(self.values, "scores")
        object.__setattr__(self, "values", vals)
        n, l = vals.shape
        if n != len(self.ids):
            raise AlignmentError(f"scores have {n} rows but {len(self.ids)} ids")
        if l != len(self.taxonomy):
            raise AlignmentError(
                f"scores have {l} columns but taxonomy {self.taxonomy.name!r} "
                f"has {len(self.taxonomy)} labels"
            )


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def read_corpus(path, taxonomy: EmotionTaxonomy, split: str = "unsplit",
                allow_empty_labels: bool = False) -> Corpus:
    """Read a JSONL corpus; malformed lines are reported with their line number."""
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            try:
                labels = frozenset(normalize_label(x) for x in obj["labels"])
                if not labels and not allow_empty_labels:
                    raise SchemaError("empty label set")
                samples.append(Sample(
                    id=str(obj["id"]),
                    lang=str(obj["lang"]),
                    text=_nfc(str(obj["text"])),
                    labels=labels,
                    script=obj.get("script", "native"),
                    empty_gold=not labels,
                ))
            except KeyError as exc:
                raise SchemaError(f"{path}:{lineno}: missing field {exc}") from None
            except SchemaError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
    return Corpus(taxonomy=taxonomy, samples=tuple(samples), split=split)


def write_corpus(corpus: Corpus, path) -> None:
    """Write JSONL with canonical field and label order (byte-stable)."""
    order = {lab: i for i, lab in enumerate(corpus.taxonomy.labels)}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in corpus.samples:
            obj = {
                "id": s.id,
                "lang": s.lang,
                "text": s.text,
                "labels": sorted(s.labels, key=order.__getitem__),
                "script": s.script,
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def binarize(corpus: Corpus) -> GoldMatrix:
    """Encode sample label sets as an N x L binary matrix in taxonomy order."""
    n, l = len(corpus), len(corpus.taxonomy)
    values = np.zeros((n, l), dtype=np.int8)
    col = {lab: j for j, lab in enumerate(corpus.taxonomy.labels)}
    for i, s in enumerate(corpus.samples):
        for lab in s.labels:
            values[i, col[lab]] = 1
    return GoldMatrix(ids=corpus.ids(), taxonomy=corpus.taxonomy, values=values)


def read_scores(path, taxonomy: EmotionTaxonomy) -> ScoreMatrix:
    """Read a score file (headered CSV or JSONL); columns are reordered to taxonomy order."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _read_scores_csv(path, taxonomy)
    return _read_scores_jsonl(path, taxonomy)


def _finish_scores(path, taxonomy, ids, rows) -> ScoreMatrix:
    if not ids:
        raise SchemaError(f"{path}: score file is empty")
    values = np.asarray(rows, dtype=np.float64)
    if values.min() < 0.0 or values.max() > 1.0:
        raise SchemaError(f"{path}: score outside [0, 1]")
    return ScoreMatrix(ids=tuple(ids), taxonomy=taxonomy, values=values)


def _read_scores_csv(path, taxonomy) -> ScoreMatrix:
    ids, rows, seen = [], [], set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        cols = [c for c in (reader.fieldnames or []) if c != "id"]
        if "id" not in (reader.fieldnames or []):
            raise SchemaError(f"{path}: missing id column")
        missing = [lab for lab in taxonomy.labels if lab not in cols]
        if missing:
            raise SchemaError(f"{path}: missing label column(s) {missing}")
        for rec in reader:
            rid = rec["id"]
            if rid in seen:
                raise SchemaError(f"{path}: duplicate id {rid!r}")
            seen.add(rid)
            ids.append(rid)
            rows.append([float(rec[lab]) for lab in taxonomy.labels])
    return _finish_scores(path, taxonomy, ids, rows)


def _read_scores_jsonl(path, taxonomy) -> ScoreMatrix:
    ids, rows, seen = [], [], set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            rid = str(obj.get("id", ""))
            if not rid:
                raise SchemaError(f"{path}:{lineno}: missing id")
            if rid in seen:
                raise SchemaError(f"{path}:{lineno}: duplicate id {rid!r}")
            seen.add(rid)
            score_map = obj.get("scores", obj)
            try:
                rows.append([float(score_map[lab]) for lab in taxonomy.labels])
            except KeyError as exc:
                raise SchemaError(f"{path}:{lineno}: missing label {exc}") from None
            ids.append(rid)
    return _finish_scores(path, taxonomy, ids, rows)


def align_scores(gold: GoldMatrix, scores: ScoreMatrix) -> ScoreMatrix:
    """Reorder score rows to the gold id order; every gold id must have a score row."""
    pos = {rid: i for i, rid in enumerate(scores.ids)}
    idx = []
    for rid in gold.ids:
        if rid not in pos:
            raise AlignmentError(f"no score row for gold id {rid!r}")
        idx.append(pos[rid])
    return ScoreMatrix(ids=gold.ids, taxonomy=scores.taxonomy,
                       values=scores.values[np.asarray(idx, dtype=np.intp)])


# -- benchmark adapters -------------------------------------------------------

GOEMOTIONS_LABELS = builtin_taxonomy("goemotions28").labels


def adapt_goemotions(path) -> Corpus:
    """Adapt the benchmark's TSV layout (text, comma-separated label ids, id)."""
    taxonomy = builtin_taxonomy("goemotions28")
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise SchemaError(f"{path}:{lineno}: expected 3 tab-separated fields")
            text, id_str, rid = parts[0], parts[1], parts[2]
            labels = set()
            for tok in id_str.split(","):
                li = int(tok)
                if not 0 <= li < len(GOEMOTIONS_LABELS):
                    raise SchemaError(f"{path}:{lineno}: label id {li} out of range")
                labels.add(GOEMOTIONS_LABELS[li])
            samples.append(Sample(id=rid, lang="en", text=_nfc(text),
                                  labels=frozenset(labels)))
    return Corpus(taxonomy=taxonomy, samples=tuple(samples))


SEMEVAL_COLUMNS = ("anger", "anticipation", "disgust", "fear", "joy", "love",
                   "optimism", "pessimism", "sadness", "surprise", "trust")


def adapt_semeval(path, lang: str) -> Corpus:
    """Adapt the benchmark's TSV layout (id, tweet, 11 binary indicator columns).

    All-zero indicator rows are retained with empty_gold=True; downstream
    evaluation excludes them by default.
    """
    taxonomy = builtin_taxonomy("semeval11")
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if lineno == 1 and parts[0].strip().lower() == "id":
                continue  # header row
            if len(parts) != 2 + len(SEMEVAL_COLUMNS):
                raise SchemaError(
                    f"{path}:{lineno}: expected {2 + len(SEMEVAL_COLUMNS)} fields"
                )
            rid, text = parts[0], parts[1]
            labels = set()
            for col, tok in zip(SEMEVAL_COLUMNS, parts[2:]):
                if tok not in ("0", "1"):
                    raise SchemaError(f"{path}:{lineno}: non-binary indicator {tok!r}")
                if tok == "1":
                    labels.add(col)
            samples.append(Sample(id=rid, lang=lang, text=_nfc(text),
                                  labels=frozenset(labels), empty_gold=not labels))
    return Corpus(taxonomy=taxonomy, samples=tuple(samples))
