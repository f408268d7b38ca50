"""Command-line interface: one binary, subcommand per pipeline stage.

Values may come from a YAML config file (--config); flags win over config
entries, which win over defaults. Validation failures emit a
machine-readable JSON error envelope on stderr with a stable exit code.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import yaml

from . import __version__
from .data import (adapt_goemotions, adapt_semeval, align_scores, binarize,
                   builtin_taxonomy, language_registry, read_corpus,
                   read_scores, write_corpus)
from .decision import DecisionRule, calibrate_threshold, compare_rules
from .errors import (AlignmentError, BudgetError, DegenerateInputError,
                     MultiemoError, SchemaError)
from .metrics import evaluate_all
from .pipeline import (GenerationSpec, LanguageSpec, MockGenerator,
                       SplitSpec, corpus_stats, filter_lexical_diversity,
                       filter_near_duplicates, generate_batch,
                       stratified_split)
from .pipeline.generate import HttpGenerator
from .reporting import ParetoPoint, emit_curves, pareto_frontier
from .taxonomy import (intersection_view, load_mapping, load_taxonomy,
                       project_gold, projected_view)

BUILTIN_TAXONOMIES = ("ours11", "goemotions28", "semeval11")

EXIT_CODES = {
    SchemaError: 2,
    AlignmentError: 3,
    DegenerateInputError: 4,
    BudgetError: 5,
}


def _fail(exc: Exception) -> None:
    code = next((c for t, c in EXIT_CODES.items() if isinstance(exc, t)), 1)
    envelope = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    click.echo(json.dumps(envelope), err=True)
    sys.exit(code)


def wrapped(fn):
    @functools.wraps(fn)
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MultiemoError as exc:
            _fail(exc)
        except (OSError, ValueError, KeyError) as exc:
            _fail(exc)
    return inner


def resolve_taxonomy(name_or_path: str):
    if name_or_path in BUILTIN_TAXONOMIES:
        return builtin_taxonomy(name_or_path)
    return load_taxonomy(name_or_path)


def apply_config(ctx: click.Context, kwargs: dict) -> dict:
    """Overlay config-file values beneath explicitly passed flags."""
    config = (ctx.obj or {}).get("config", {})
    section = config.get(ctx.command.name, {})
    merged = dict(kwargs)
    for key, value in section.items():
        key = key.replace("-", "_")
        if key in merged and ctx.get_parameter_source(key) is not None:
            from click.core import ParameterSource
            if ctx.get_parameter_source(key) != ParameterSource.COMMANDLINE:
                merged[key] = value
    return merged


@click.group()
@click.version_option(__version__)
@click.option("--config", type=click.Path(exists=True), default=None,
              help="YAML config file; flags override its values.")
@click.pass_context
def main(ctx, config):
    """Multilingual multi-label emotion evaluation and corpus tooling."""
    ctx.obj = {"config": {}}
    if config:
        ctx.obj["config"] = yaml.safe_load(Path(config).read_text()) or {}


@main.command()
@click.option("--gold", required=True, type=click.Path(exists=True),
              help="Gold corpus file.")
@click.option("--gold-format", type=click.Choice(["jsonl", "goemotions", "semeval"]),
              default="jsonl")
@click.option("--gold-taxonomy", default="ours11",
              help="Taxonomy of the gold corpus (builtin name or path).")
@click.option("--gold-lang", default="en", help="Language tag for the semeval adapter.")
@click.option("--scores", "scores_path", required=True, type=click.Path(exists=True))
@click.option("--scores-taxonomy", default="ours11")
@click.option("--mapping", default=None,
              help="TSV mapping path, or a builtin name "
                   "(goemotions_to_ours, semeval_to_ours).")
@click.option("--view", type=click.Choice(["native", "projected", "intersection"]),
              default="native")
@click.option("--rule", type=click.Choice(["threshold", "argmax"]), default="threshold")
@click.option("--tau", type=float, default=0.5)
@click.option("--keep-empty-gold", is_flag=True,
              help="Keep benchmark rows whose gold label set is empty.")
@click.option("--per-language/--no-per-language", default=True)
@click.option("--out", "out_prefix", required=True,
              help="Output prefix; writes PREFIX.json and PREFIX.md.")
@click.pass_context
@wrapped
def evaluate(ctx, **kwargs):
    """Evaluate a score file against a gold corpus."""
    kw = apply_config(ctx, kwargs)
    gold_tax = resolve_taxonomy(kw["gold_taxonomy"])
    if kw["gold_format"] == "goemotions":
        corpus = adapt_goemotions(kw["gold"])
    elif kw["gold_format"] == "semeval":
        corpus = adapt_semeval(kw["gold"], lang=kw["gold_lang"])
    else:
        corpus = read_corpus(kw["gold"], gold_tax)

    n_empty = corpus.n_empty_gold()
    if not kw["keep_empty_gold"]:
        corpus = corpus.without_empty_gold()

    gold = binarize(corpus)
    score_tax = resolve_taxonomy(kw["scores_taxonomy"])
    scores = align_scores(gold, read_scores(kw["scores_path"], score_tax))
    groups = corpus.languages() if kw["per_language"] else None
    notes = {}
    if n_empty:
        notes["empty_gold_rows"] = n_empty
        notes["empty_gold_handling"] = "kept" if kw["keep_empty_gold"] else "excluded"

    if kw["view"] == "projected":
        if kw["mapping"] is None:
            raise SchemaError("projected view requires --mapping")
        if kw["mapping"] in ("goemotions_to_ours", "semeval_to_ours"):
            from .data import builtin_mapping
            mapping = builtin_mapping(kw["mapping"])
        else:
            mapping = load_mapping(kw["mapping"], source=gold.taxonomy, target=score_tax)
        projected, flagged = project_gold(gold.values, mapping)
        notes["all_zero_projected_rows"] = int(flagged.sum())
        notes["all_zero_handling"] = "flagged and kept"
        gold_vals, score_vals, labels = projected, scores.values, score_tax.labels
        view_desc = projected_view(score_tax)
    elif kw["view"] == "intersection":
        from .taxonomy import apply_view
        view_desc = intersection_view(score_tax, gold.taxonomy)
        g2, s2, kept = apply_view(gold, scores, view_desc)
        gold_vals, score_vals, labels = g2.values, s2.values, g2.taxonomy.labels
        groups = [groups[i] for i in kept] if groups else None
        notes["rows_dropped_outside_intersection"] = len(gold.ids) - len(kept)
    else:
        if gold.taxonomy.labels != score_tax.labels:
            raise SchemaError(
                "native view requires matching gold and score taxonomies; "
                "use --view projected or intersection"
            )
        gold_vals, score_vals, labels = gold.values, scores.values, score_tax.labels
        view_desc = None

    rule = (DecisionRule("threshold", kw["tau"]) if kw["rule"] == "threshold"
            else DecisionRule("argmax"))
    report = evaluate_all(score_vals, gold_vals, rule, groups=groups, labels=list(labels))
    report.notes.update(notes)
    if view_desc is not None:
        report.notes["label_space"] = view_desc.kind
        report.notes["effective_labels"] = list(view_desc.effective_labels)

    prefix = Path(kw["out_prefix"])
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.json").write_text(report.to_json() + "\n", encoding="utf-8")
    Path(f"{prefix}.md").write_text(report.to_markdown(), encoding="utf-8")
    click.echo(f"wrote {prefix}.json and {prefix}.md")


def _parse_grid(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise SchemaError("grid must be start:stop:step, e.g. 0.05:0.95:0.05")
    start, stop, step = (float(p) for p in parts)
    grid, t = [], start
    while t <= stop + 1e-9:
        grid.append(round(t, 10))
        t += step
    return grid


@main.command()
@click.option("--scores", "scores_path", required=True, type=click.Path(exists=True))
@click.option("--gold", required=True, type=click.Path(exists=True),
              help="Validation gold corpus (JSONL).")
@click.option("--taxonomy", default="ours11")
@click.option("--grid", default="0.05:0.95:0.05")
@click.option("--out", default=None, help="Write JSON here instead of stdout.")
@click.pass_context
@wrapped
def calibrate(ctx, **kwargs):
    """Grid-search the decision threshold on validation data."""
    kw = apply_config(ctx, kwargs)
    tax = resolve_taxonomy(kw["taxonomy"])
    corpus = read_corpus(kw["gold"], tax)
    gold = binarize(corpus)
    scores = align_scores(gold, read_scores(kw["scores_path"], tax))
    result = calibrate_threshold(scores.values, gold.values, grid=_parse_grid(kw["grid"]))
    payload = json.dumps(result.to_dict(), indent=2)
    if kw["out"]:
        Path(kw["out"]).write_text(payload + "\n", encoding="utf-8")
    else:
        click.echo(payload)


@main.command()
@click.option("--scores", "scores_path", required=True, type=click.Path(exists=True))
@click.option("--gold", required=True, type=click.Path(exists=True))
@click.option("--taxonomy", default="ours11")
@click.option("--tau", type=float, default=0.5)
@click.option("--out", default=None)
@click.pass_context
@wrapped
def compare(ctx, **kwargs):
    """Paired evaluation under the threshold and argmax decision rules."""
    kw = apply_config(ctx, kwargs)
    tax = resolve_taxonomy(kw["taxonomy"])
    corpus = read_corpus(kw["gold"], tax).without_empty_gold()
    gold = binarize(corpus)
    scores = align_scores(gold, read_scores(kw["scores_path"], tax))
    comp = compare_rules(scores.values, gold.values, tau=kw["tau"],
                         labels=list(tax.labels))
    payload = json.dumps(comp.to_dict(), indent=2)
    if kw["out"]:
        Path(kw["out"]).write_text(payload + "\n", encoding="utf-8")
    else:
        click.echo(payload)


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True),
              help="YAML generation spec (languages, budgets, seed, ...).")
@click.option("--generator", "generator_kind",
              type=click.Choice(["mock", "http"]), default="mock")
@click.option("--out", required=True, help="Output corpus JSONL.")
@click.option("--verdicts", default=None, help="JSONL audit log of filter verdicts.")
@click.option("--workers", type=int, default=1)
@click.pass_context
@wrapped
def generate(ctx, **kwargs):
    """Generate a synthetic corpus via the configured text generator."""
    kw = apply_config(ctx, kwargs)
    raw = yaml.safe_load(Path(kw["spec_path"]).read_text()) or {}
    tax = resolve_taxonomy(raw.get("taxonomy", "ours11"))
    registry = language_registry()
    languages = []
    for entry in raw.get("languages", []):
        code = entry["code"]
        languages.append(LanguageSpec(
            code=code,
            budget=int(entry["budget"]),
            romanize_eligible=bool(entry.get(
                "romanize_eligible", registry.get(code, ("", False))[1])),
            template_id=entry.get("template_id"),
        ))
    spec_kwargs = dict(languages=tuple(languages), taxonomy=tax,
                       seed=int(raw.get("seed", 0)))
    if "cardinality_mix" in raw:
        spec_kwargs["cardinality_mix"] = {int(k): float(v)
                                          for k, v in raw["cardinality_mix"].items()}
    if "label_marginals" in raw:
        spec_kwargs["label_marginals"] = {k: float(v)
                                          for k, v in raw["label_marginals"].items()}
    spec = GenerationSpec(**spec_kwargs)
    generator = MockGenerator() if kw["generator_kind"] == "mock" else HttpGenerator()
    samples = generate_batch(spec, generator, workers=kw["workers"],
                             verdict_log=kw["verdicts"])
    from .data import Corpus
    corpus = Corpus(taxonomy=tax, samples=tuple(samples))
    write_corpus(corpus, kw["out"])
    click.echo(f"wrote {len(samples)} samples to {kw['out']}")


@main.command(name="filter")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--taxonomy", default="ours11")
@click.option("--out", required=True)
@click.option("--verdicts", default=None)
@click.option("--min-ttr", type=float, default=0.4)
@click.option("--min-tokens", type=int, default=20)
@click.option("--shingle-size", type=int, default=5)
@click.option("--dup-threshold", type=float, default=0.85)
@click.pass_context
@wrapped
def filter_cmd(ctx, **kwargs):
    """Apply lexical-diversity and near-duplicate filters to a corpus."""
    kw = apply_config(ctx, kwargs)
    tax = resolve_taxonomy(kw["taxonomy"])
    corpus = read_corpus(kw["in_path"], tax)
    verdicts = []
    survivors = []
    for s in corpus.samples:
        ok, ttr = filter_lexical_diversity(s.text, kw["min_ttr"], kw["min_tokens"])
        if ok:
            survivors.append(s)
        else:
            verdicts.append({"id": s.id, "passed": False,
                             "reasons": [{"kind": "low_lexical_diversity",
                                          "ttr": round(ttr, 4)}]})
    dup_verdicts = filter_near_duplicates(
        survivors, shingle_size=kw["shingle_size"],
        jaccard_threshold=kw["dup_threshold"])
    passed_ids = {v.sample_id for v in dup_verdicts if v.passed}
    verdicts.extend(v.to_dict() for v in dup_verdicts)
    kept = tuple(s for s in survivors if s.id in passed_ids)

    from .data import Corpus
    write_corpus(Corpus(taxonomy=tax, samples=kept, split=corpus.split), kw["out"])
    if kw["verdicts"]:
        with open(kw["verdicts"], "w", encoding="utf-8", newline="\n") as fh:
            for v in verdicts:
                fh.write(json.dumps(v, ensure_ascii=False) + "\n")
    click.echo(f"kept {len(kept)} of {len(corpus)} samples")


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--taxonomy", default="ours11")
@click.option("--val", type=int, default=500)
@click.option("--test", "test_n", type=int, default=500)
@click.option("--stratify", default="lang")
@click.option("--seed", type=int, default=0)
@click.option("--out-dir", required=True)
@click.pass_context
@wrapped
def split(ctx, **kwargs):
    """Language-stratified train/validation/test split."""
    kw = apply_config(ctx, kwargs)
    if kw["stratify"] not in ("lang", "language"):
        raise SchemaError("only --stratify lang is supported")
    tax = resolve_taxonomy(kw["taxonomy"])
    corpus = read_corpus(kw["in_path"], tax)
    spec = SplitSpec(validation_per_language=kw["val"], test_per_language=kw["test_n"])
    train, val, test = stratified_split(corpus, spec, seed=kw["seed"])
    out = Path(kw["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", train), ("validation", val), ("test", test)):
        write_corpus(part, out / f"{name}.jsonl")
    click.echo(f"train={len(train)} validation={len(val)} test={len(test)}")


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--taxonomy", default="ours11")
@click.option("--out", default=None)
@click.pass_context
@wrapped
def stats(ctx, **kwargs):
    """Corpus statistics: class shares, cardinality, lengths, languages."""
    kw = apply_config(ctx, kwargs)
    tax = resolve_taxonomy(kw["taxonomy"])
    corpus = read_corpus(kw["in_path"], tax)
    result = corpus_stats(corpus)
    payload = result.to_json()
    if kw["out"]:
        Path(kw["out"]).write_text(payload + "\n", encoding="utf-8")
    else:
        click.echo(payload)


@main.command()
@click.option("--runs", required=True, type=click.Path(exists=True),
              help="JSON list of runs with cost and quality fields.")
@click.option("--cost", default="train_minutes")
@click.option("--quality", default="jaccard")
@click.option("--out", default=None)
@click.pass_context
@wrapped
def pareto(ctx, **kwargs):
    """Non-dominated (cost, quality) frontier over a runs file."""
    kw = apply_config(ctx, kwargs)
    raw = json.loads(Path(kw["runs"]).read_text(encoding="utf-8"))
    points = []
    for obj in raw:
        cost = obj.get(kw["cost"], obj.get("metrics", {}).get(kw["cost"]))
        quality = obj.get(kw["quality"], obj.get("metrics", {}).get(kw["quality"]))
        if cost is None or quality is None:
            raise SchemaError(f"run {obj.get('name')!r} lacks "
                              f"{kw['cost']!r} or {kw['quality']!r}")
        points.append(ParetoPoint(obj["name"], float(cost), float(quality)))
    frontier = pareto_frontier(points)
    frontier_names = {p.name for p in frontier}
    payload = json.dumps({
        "cost": kw["cost"],
        "quality": kw["quality"],
        "frontier": [{"name": p.name, "cost": p.cost, "quality": p.quality}
                     for p in frontier],
        "dominated": sorted(p.name for p in points if p.name not in frontier_names),
    }, indent=2)
    if kw["out"]:
        Path(kw["out"]).write_text(payload + "\n", encoding="utf-8")
    else:
        click.echo(payload)


@main.command()
@click.option("--scores", "scores_path", required=True, type=click.Path(exists=True))
@click.option("--gold", required=True, type=click.Path(exists=True))
@click.option("--taxonomy", default="ours11")
@click.option("--out", required=True)
@click.pass_context
@wrapped
def curves(ctx, **kwargs):
    """Emit the micro precision-recall curve as plot-ready CSV."""
    kw = apply_config(ctx, kwargs)
    tax = resolve_taxonomy(kw["taxonomy"])
    corpus = read_corpus(kw["gold"], tax).without_empty_gold()
    gold = binarize(corpus)
    scores = align_scores(gold, read_scores(kw["scores_path"], tax))
    ap = emit_curves(scores.values, gold.values, kw["out"])
    click.echo(f"wrote {kw['out']} (ap_micro={ap:.6f})")


if __name__ == "__main__":
    main()
