"""Dataset-level filtering rules applied before instance derivation."""

from __future__ import annotations

from collections import Counter
from dataclasses import replace

from ..types import Polarity, RawSentence


def filter_conflict(sentences: list[RawSentence]) -> list[RawSentence]:
    """Drop annotations labelled `conflict`; sentence texts are kept."""
    out = []
    for s in sentences:
        kept = [a for a in s.aspects if a.polarity != Polarity.CONFLICT]
        if kept == s.aspects:
            out.append(s)
        else:
            out.append(RawSentence(s.id, s.text, kept, s.domain, s.source_dataset))
    return out


def top_categories(sentences: list[RawSentence], k: int) -> list[str]:
    """The k most frequent aspect categories, ties broken lexicographically."""
    counts = Counter(
        a.category for s in sentences for a in s.aspects if a.category is not None
    )
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [c for c, _ in ranked[:k]]


def filter_top_aspect_categories(
    sentences: list[RawSentence],
    k: int,
    reference: list[RawSentence] | None = None,
) -> list[RawSentence]:
    """Keep only annotations whose category ranks in the top k by frequency.

    Frequencies are counted over `reference` (the train portion) when given,
    otherwise over `sentences` itself. Sentence texts are never removed, only
    annotations outside the top-k categories.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    keep = set(top_categories(reference if reference is not None else sentences, k))
    out = []
    for s in sentences:
        kept = [a for a in s.aspects if a.category is None or a.category in keep]
        if kept == s.aspects:
            out.append(s)
        else:
            out.append(RawSentence(s.id, s.text, kept, s.domain, s.source_dataset))
    return out
