"""Deterministic prompt rendering from per-language template files.

Templates are plain-text data files with {language}, {labels}, and
{script_directive} placeholders, editable without code changes. A custom
template directory can override the shipped ones.
"""

from __future__ import annotations

from pathlib import Path

from ..data import _data_path, language_registry
from ..errors import SchemaError

SCRIPT_DIRECTIVES = {
    "native": "Write in the native script of the language.",
    "latin": ("Write the text in romanised form, using only Latin characters, "
              "as commonly done in informal digital communication."),
}


def _template_path(template_id: str, template_dir=None) -> Path:
    if template_dir is not None:
        candidate = Path(template_dir) / f"{template_id}.txt"
        if candidate.exists():
            return candidate
    shipped = _data_path("prompts", f"{template_id}.txt")
    if not shipped.exists():
        raise SchemaError(f"no prompt template registered for {template_id!r}")
    return shipped


def render_prompt(template_id: str, lang: str, labels, script: str = "native",
                  template_dir=None) -> str:
    """Render the generation prompt for one sample; identical inputs give
    identical strings."""
    if script not in SCRIPT_DIRECTIVES:
        raise SchemaError(f"unknown script {script!r}")
    template = _template_path(template_id, template_dir).read_text(encoding="utf-8")
    registry = language_registry()
    language_name = registry.get(lang, (lang, False))[0]
    return template.format(
        language=language_name,
        labels=", ".join(sorted(labels)),
        script_directive=SCRIPT_DIRECTIVES[script],
    )
