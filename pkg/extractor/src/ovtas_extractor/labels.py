"""Action-label normalization: raw annotation names to natural phrases.

Generic rule: underscores and separators become spaces, everything is
lowercased, whitespace collapses. Dataset-specific rewrites (for GTEA's
verb-object annotations, which need the verb attached to form a phrase)
come from a JSON table shipped with the package and applied before the
generic rule; the table maps raw annotation strings to their phrase.
"""

from __future__ import annotations

import json
import re
from importlib import resources

__all__ = ["normalize_label", "load_rewrite_table", "normalize_labels"]

_SEPARATORS = re.compile(r"[_\s,<>\(\)]+")


def load_rewrite_table(dataset: str | None) -> dict[str, str]:
    """Rewrite table for a dataset, empty when none ships."""
    if dataset is None:
        return {}
    name = dataset.strip().lower().replace(" ", "")
    try:
        text = (
            resources.files("ovtas_extractor")
            .joinpath(f"data/{name}_rewrites.json")
            .read_text(encoding="utf-8")
        )
    except FileNotFoundError:
        return {}
    return json.loads(text)


def normalize_label(raw_label: str, rewrites: dict[str, str] | None = None) -> str:
    """Turn a raw annotation label into a lowercase natural-language phrase."""
    if rewrites:
        hit = rewrites.get(raw_label) or rewrites.get(raw_label.strip())
        if hit is not None:
            raw_label = hit
    phrase = _SEPARATORS.sub(" ", raw_label).strip().lower()
    if not phrase:
        raise ValueError(f"empty label after normalization: {raw_label!r}")
    return re.sub(r"\s+", " ", phrase)


def normalize_labels(
    raw_labels: list[str], dataset: str | None = None
) -> list[str]:
    """Normalize a label list, rejecting duplicates (raw or normalized)."""
    rewrites = load_rewrite_table(dataset)
    seen: dict[str, str] = {}
    out = []
    for raw in raw_labels:
        phrase = normalize_label(raw, rewrites)
        if phrase in seen:
            raise ValueError(
                f"duplicate action: {raw!r} and {seen[phrase]!r} both "
                f"normalize to {phrase!r}"
            )
        seen[phrase] = raw
        out.append(phrase)
    return out
