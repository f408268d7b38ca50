"""Result artifacts: metric tables, per-language matrices, Pareto
frontiers, and plot-ready PR-curve CSVs."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

from .errors import SchemaError
from .metrics import EvaluationReport, ap_micro, pr_curve_micro

TABLE_LAYOUTS = {
    "indomain": ("f1_micro", "f1_macro", "jaccard_samples", "auc_micro", "ap_micro", "lrap"),
    "cross": ("f1_micro", "auc_micro"),
    "headtohead": ("f1_micro", "auc_micro", "ap_micro", "lrap"),
}

COLUMN_TITLES = {
    "f1_micro": "F1-mic", "f1_macro": "F1-mac", "jaccard_samples": "Jacc.",
    "auc_micro": "AUC", "ap_micro": "AP", "lrap": "LRAP",
    "subset_accuracy": "Subset", "hamming_accuracy": "Hamming",
}


@dataclass
class ModelRunRecord:
    """One trained model's metadata plus its evaluation reports.

    Reports are keyed by (dataset, label_space, rule) tuples.
    """

    name: str
    params: int = 0
    train_minutes: float = 0.0
    reports: dict[tuple, EvaluationReport] = field(default_factory=dict)

    def report_for(self, dataset: str, label_space: str = "native",
                   rule: str = "threshold") -> EvaluationReport:
        key = (dataset, label_space, rule)
        if key not in self.reports:
            raise SchemaError(f"record {self.name!r} has no report for {key}")
        return self.reports[key]


def per_language_matrix(records: list[ModelRunRecord], dataset: str,
                        label_space: str = "native", rule: str = "threshold"):
    """(languages, model names, rows) with languages sorted by ascending mean
    F1-micro (hardest first); ties break alphabetically."""
    model_names = [r.name for r in records]
    per_model = []
    for rec in records:
        rep = rec.report_for(dataset, label_space, rule)
        if not rep.per_language:
            raise SchemaError(f"record {rec.name!r} lacks per-language data for {dataset!r}")
        per_model.append(rep.per_language)
    languages = sorted(per_model[0])
    for pl in per_model[1:]:
        if sorted(pl) != languages:
            raise SchemaError("records disagree on the language set")

    def mean_f1(lang):
        return sum(pl[lang] for pl in per_model) / len(per_model)

    languages.sort(key=lambda lang: (mean_f1(lang), lang))
    rows = [[pl[lang] for pl in per_model] for lang in languages]
    return languages, model_names, rows


def per_language_csv(records, dataset: str, **kwargs) -> str:
    languages, names, rows = per_language_matrix(records, dataset, **kwargs)
    out = io.StringIO()
    out.write("lang," + ",".join(names) + "\n")
    for lang, row in zip(languages, rows):
        out.write(lang + "," + ",".join(f"{v:.6f}" for v in row) + "\n")
    return out.getvalue()


@dataclass(frozen=True)
class ParetoPoint:
    name: str
    cost: float
    quality: float


def pareto_frontier(points) -> list[ParetoPoint]:
    """Non-dominated subset, sorted by cost.

    A point is dominated iff another has cost <= and quality >= with at
    least one strict inequality; among identical (cost, quality) points
    only the first by name order survives.
    """
    pts = [p if isinstance(p, ParetoPoint) else ParetoPoint(*p) for p in points]
    if any(p.cost <= 0 for p in pts):
        raise SchemaError("costs must be positive")
    frontier = []
    for p in pts:
        dominated = False
        for q in pts:
            if q is p:
                continue
            if (q.cost, q.quality) == (p.cost, p.quality):
                if q.name < p.name:  # dominated-by-tie
                    dominated = True
                    break
                continue
            if q.cost <= p.cost and q.quality >= p.quality:
                dominated = True
                break
        if not dominated:
            frontier.append(p)
    return sorted(frontier, key=lambda p: (p.cost, p.name))


def _format_value(v: float, leading_zero: bool) -> str:
    s = f"{v:.3f}"
    if not leading_zero and s.startswith("0."):
        s = s[1:]
    return s


def render_table(records: list[ModelRunRecord], layout: str, dataset: str,
                 label_space: str = "native", rule: str = "threshold",
                 leading_zero: bool = False) -> tuple[str, str]:
    """(markdown, csv) for one table layout; best value per column is bolded
    in the Markdown, CSV carries full-precision values."""
    if layout not in TABLE_LAYOUTS:
        raise SchemaError(f"unknown table layout {layout!r}")
    columns = TABLE_LAYOUTS[layout]
    values = []
    for rec in records:
        rep = rec.report_for(dataset, label_space, rule)
        values.append([getattr(rep, col) for col in columns])

    best = [max(col_vals) for col_vals in zip(*values)] if values else []

    md = io.StringIO()
    md.write("| Model | " + " | ".join(COLUMN_TITLES[c] for c in columns) + " |\n")
    md.write("|" + "---|" * (len(columns) + 1) + "\n")
    for rec, row in zip(records, values):
        cells = []
        for v, b in zip(row, best):
            s = _format_value(v, leading_zero)
            cells.append(f"**{s}**" if v == b else s)
        md.write(f"| {rec.name} | " + " | ".join(cells) + " |\n")

    csv_out = io.StringIO()
    csv_out.write("model," + ",".join(columns) + "\n")
    for rec, row in zip(records, values):
        csv_out.write(rec.name + "," + ",".join(repr(v) for v in row) + "\n")
    return md.getvalue(), csv_out.getvalue()


def emit_curves(scores, gold, path) -> float:
    """Write the micro PR curve as CSV with the AP value in a header comment.

    Returns the AP so callers can cross-check the file contents.
    """
    ap = ap_micro(scores, gold)
    points = pr_curve_micro(scores, gold)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# ap_micro={ap!r}\n")
        fh.write("threshold,precision,recall\n")
        for recall, precision, threshold in points:
            fh.write(f"{threshold!r},{precision!r},{recall!r}\n")
    return ap


def read_curves(path) -> tuple[float, list[tuple[float, float, float]]]:
    """Read a PR-curve CSV back into (ap, [(recall, precision, threshold)])."""
    points = []
    ap = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key == "ap_micro":
                    ap = float(val)
            elif line and not line.startswith("threshold,"):
                t, p, r = (float(x) for x in line.split(","))
                points.append((r, p, t))
    if ap is None:
        raise SchemaError(f"{path}: missing ap_micro header")
    return ap, points


def load_runs(path) -> list[ModelRunRecord]:
    """Load run metadata (name, params, train_minutes, metric values) from JSON.

    Used by the Pareto subcommand; metric values come from user-supplied
    run metadata, never measured here.
    """
    raw = json.loads(open(path, encoding="utf-8").read())
    records = []
    for obj in raw:
        records.append(ModelRunRecord(
            name=obj["name"],
            params=int(obj.get("params", 0)),
            train_minutes=float(obj.get("train_minutes", 0.0)),
        ))
        records[-1].metrics = obj.get("metrics", {})  # free-form quality values
    return records
