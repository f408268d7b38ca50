"""Multi-label evaluation metrics, threshold-based and threshold-free.

Threshold-based metrics consume binary prediction matrices; threshold-free
metrics (AUROC, AP, LRAP) consume the raw score matrix and depend only on
score ranks. Micro-averaged quantities pool all (row, label) cells.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateInputError, SchemaError
from .validation import check_binary, check_same_shape, check_unit_interval


def _pair(pred, gold):
    p = check_binary(pred, "pred")
    g = check_binary(gold, "gold")
    check_same_shape(p, g)
    return p, g


def _score_pair(scores, gold):
    s = check_unit_interval(scores, "scores")
    g = check_binary(gold, "gold")
    check_same_shape(s, g, "scores/gold")
    n_pos = int(g.sum())
    if n_pos == 0 or n_pos == g.size:
        raise DegenerateInputError(
            "threshold-free metrics need at least one positive and one negative cell"
        )
    return s, g


def subset_accuracy(pred, gold) -> float:
    """Fraction of rows whose predicted label set equals the gold set exactly."""
    p, g = _pair(pred, gold)
    return float(np.all(p == g, axis=1).mean())


def hamming_accuracy(pred, gold) -> float:
    """Fraction of agreeing (row, label) cells."""
    p, g = _pair(pred, gold)
    return float((p == g).mean())


def jaccard_samples(pred, gold) -> float:
    """Sample-averaged Jaccard similarity; a row with both sets empty scores 1."""
    p, g = _pair(pred, gold)
    inter = np.logical_and(p, g).sum(axis=1).astype(np.float64)
    union = np.logical_or(p, g).sum(axis=1).astype(np.float64)
    per_row = np.where(union > 0, inter / np.maximum(union, 1), 1.0)
    return float(math.fsum(per_row) / len(per_row))


def per_label_prf(pred, gold, labels=None) -> list[tuple]:
    """(label, precision, recall, f1, support) per column."""
    p, g = _pair(pred, gold)
    n_labels = p.shape[1]
    if labels is None:
        labels = [str(j) for j in range(n_labels)]
    out = []
    for j in range(n_labels):
        tp = int(np.logical_and(p[:, j], g[:, j]).sum())
        fp = int(np.logical_and(p[:, j], 1 - g[:, j]).sum())
        fn = int(np.logical_and(1 - p[:, j], g[:, j]).sum())
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
        out.append((labels[j], prec, rec, f1, tp + fn))
    return out


def f1_micro(pred, gold) -> float:
    """F1 on TP/FP/FN pooled over all cells."""
    p, g = _pair(pred, gold)
    tp = int(np.logical_and(p, g).sum())
    fp = int(np.logical_and(p, 1 - g).sum())
    fn = int(np.logical_and(1 - p, g).sum())
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def f1_macro(pred, gold) -> float:
    """Average of per-label F1.

    Convention: labels with zero gold positives and zero predicted
    positives are excluded from the average; zero gold positives with
    predicted positives contribute F1 = 0.
    """
    p, g = _pair(pred, gold)
    f1s = []
    for j in range(p.shape[1]):
        support = int(g[:, j].sum())
        predicted = int(p[:, j].sum())
        if support == 0 and predicted == 0:
            continue
        tp = int(np.logical_and(p[:, j], g[:, j]).sum())
        fp = predicted - tp
        fn = support - tp
        denom = 2 * tp + fp + fn
        f1s.append(2 * tp / denom if denom else 0.0)
    if not f1s:
        raise DegenerateInputError("no label has gold or predicted positives")
    return float(math.fsum(f1s) / len(f1s))


def auroc_micro(scores, gold) -> float:
    """Probability a random positive cell outscores a random negative one, ties half.

    Mann-Whitney rank-sum formulation over the flattened cells.
    """
    s, g = _score_pair(scores, gold)
    flat_s = s.ravel()
    flat_g = g.ravel().astype(bool)
    ranks = rankdata(flat_s, method="average")
    n_pos = int(flat_g.sum())
    n_neg = flat_g.size - n_pos
    rank_sum = float(ranks[flat_g].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _pr_steps(scores, gold):
    """Threshold groups by descending score: (thresholds, precisions, recalls).

    Cells with equal scores form one group; precision is computed after the
    whole group is included, which makes the result order-independent.
    """
    s, g = _score_pair(scores, gold)
    flat_s = s.ravel()
    flat_g = g.ravel().astype(np.int64)
    order = np.argsort(-flat_s, kind="stable")
    sorted_s = flat_s[order]
    sorted_g = flat_g[order]
    # last index of each tie group
    distinct = np.flatnonzero(np.diff(sorted_s)) if sorted_s.size > 1 else np.array([], dtype=np.intp)
    group_ends = np.concatenate([distinct, [sorted_s.size - 1]])
    cum_tp = np.cumsum(sorted_g)
    n_pos = int(flat_g.sum())
    tps = cum_tp[group_ends].astype(np.float64)
    counts = (group_ends + 1).astype(np.float64)
    precisions = tps / counts
    recalls = tps / n_pos
    thresholds = sorted_s[group_ends]
    return thresholds, precisions, recalls


def ap_micro(scores, gold) -> float:
    """Micro-averaged average precision over the step-wise PR curve (no smoothing)."""
    _, precisions, recalls = _pr_steps(scores, gold)
    prev = np.concatenate([[0.0], recalls[:-1]])
    return float(math.fsum((recalls - prev) * precisions))


def pr_curve_micro(scores, gold) -> list[tuple[float, float, float]]:
    """(recall, precision, threshold) points, one per distinct threshold.

    Starts with the (0, 1, inf) anchor and stops at the first point where
    full recall is reached; the trailing groups contribute zero area, so
    the step integral of the emitted curve equals `ap_micro` exactly.
    """
    thresholds, precisions, recalls = _pr_steps(scores, gold)
    points = [(0.0, 1.0, math.inf)]
    for t, p, r in zip(thresholds, precisions, recalls):
        points.append((float(r), float(p), float(t)))
        if r >= 1.0:
            break
    return points


def pr_curve_area(points) -> float:
    """Step integral of a PR curve as emitted by `pr_curve_micro`."""
    terms = []
    for (r_prev, _, _), (r, p, _) in zip(points, points[1:]):
        terms.append((r - r_prev) * p)
    return float(math.fsum(terms))


def lrap(scores, gold, on_empty_rows: str = "exclude") -> float:
    """Label ranking average precision.

    For each row and each true label j: rank = number of labels scoring >=
    score_j; hits = number of *true* labels scoring >= score_j; the row
    value averages hits/rank over true labels. Rows with no true label are
    excluded (`on_empty_rows="exclude"`) or an error (`"error"`).
    """
    s = check_unit_interval(scores, "scores")
    g = check_binary(gold, "gold")
    check_same_shape(s, g, "scores/gold")
    row_vals = []
    for i in range(s.shape[0]):
        true_idx = np.flatnonzero(g[i])
        if true_idx.size == 0:
            if on_empty_rows == "error":
                raise DegenerateInputError(f"row {i} has no positive label")
            continue
        row_scores = s[i]
        parts = []
        for j in true_idx:
            geq = row_scores >= row_scores[j]
            rank = int(geq.sum())
            hits = int(geq[true_idx].sum())
            parts.append(hits / rank)
        row_vals.append(math.fsum(parts) / len(parts))
    if not row_vals:
        raise DegenerateInputError("no row has a positive label")
    return float(math.fsum(row_vals) / len(row_vals))


@dataclass
class EvaluationReport:
    """All metric values for one (scores, gold, decision-rule) evaluation."""

    subset_accuracy: float
    hamming_accuracy: float
    jaccard_samples: float
    f1_micro: float
    f1_macro: float
    auc_micro: float
    ap_micro: float
    lrap: float
    per_label: list[tuple] = field(default_factory=list)
    per_language: dict[str, float] | None = None
    n_rows: int = 0
    n_labels: int = 0
    decision_rule: str = ""
    notes: dict = field(default_factory=dict)

    SCALAR_ORDER = ("f1_micro", "f1_macro", "jaccard_samples",
                    "auc_micro", "ap_micro", "lrap",
                    "subset_accuracy", "hamming_accuracy")

    def __post_init__(self):
        for name in self.SCALAR_ORDER:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise SchemaError(f"metric {name} = {v} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "n_rows": self.n_rows,
            "n_labels": self.n_labels,
            "decision_rule": self.decision_rule,
            "metrics": {name: getattr(self, name) for name in self.SCALAR_ORDER},
            "per_label": [
                {"label": lab, "precision": p, "recall": r, "f1": f, "support": sup}
                for lab, p, r, f, sup in self.per_label
            ],
            "per_language": self.per_language,
            "notes": self.notes,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def to_markdown(self) -> str:
        """Aligned-column table in the standard column order."""
        header = "| F1-mic | F1-mac | Jacc. | AUC | AP | LRAP |"
        sep = "|" + "--------|" * 6
        row = "| {:.3f} | {:.3f} | {:.3f} | {:.3f} | {:.3f} | {:.3f} |".format(
            self.f1_micro, self.f1_macro, self.jaccard_samples,
            self.auc_micro, self.ap_micro, self.lrap,
        )
        lines = [header, sep, row, "",
                 f"rows: {self.n_rows}, labels: {self.n_labels}, "
                 f"rule: {self.decision_rule}",
                 f"subset accuracy: {self.subset_accuracy:.3f}, "
                 f"hamming accuracy: {self.hamming_accuracy:.3f}"]
        if self.per_language:
            lines.append("")
            lines.append("| lang | F1-mic |")
            lines.append("|------|--------|")
            for lang in sorted(self.per_language):
                lines.append(f"| {lang} | {self.per_language[lang]:.3f} |")
        for key, val in self.notes.items():
            lines.append(f"_{key}: {val}_")
        return "\n".join(lines) + "\n"


def evaluate_all(scores, gold, rule, groups=None, labels=None) -> EvaluationReport:
    """Compute the full metric suite under one decision rule.

    `groups`, when given, is a per-row language list; the report then
    carries per-language F1-micro. `labels` names the columns for the
    per-label breakdown.
    """
    from .decision import decide, describe_rule  # lazy: decision imports metrics

    s = check_unit_interval(scores, "scores")
    g = check_binary(gold, "gold")
    check_same_shape(s, g, "scores/gold")
    pred = decide(s, rule)

    per_language = None
    if groups is not None:
        groups = list(groups)
        if len(groups) != s.shape[0]:
            raise SchemaError("groups length must equal the row count")
        per_language = {}
        for lang in sorted(set(groups)):
            mask = np.asarray([x == lang for x in groups])
            per_language[lang] = f1_micro(pred[mask], g[mask])

    return EvaluationReport(
        subset_accuracy=subset_accuracy(pred, g),
        hamming_accuracy=hamming_accuracy(pred, g),
        jaccard_samples=jaccard_samples(pred, g),
        f1_micro=f1_micro(pred, g),
        f1_macro=f1_macro(pred, g),
        auc_micro=auroc_micro(s, g),
        ap_micro=ap_micro(s, g),
        lrap=lrap(s, g),
        per_label=per_label_prf(pred, g, labels=labels),
        per_language=per_language,
        n_rows=int(s.shape[0]),
        n_labels=int(s.shape[1]),
        decision_rule=describe_rule(rule),
    )
