"""Parser for entity-relationship sentiment rows (biomedical domain).

Input is tab-separated with columns: text, entity_a, entity_b, label.
A header row matching the column names is skipped. The label vocabulary is
positive/negative/neutral; ``none`` is accepted as an alias of neutral.
"""

from __future__ import annotations

import csv
import io

from ..types import AspectAnnotation, CorpusError, Polarity, RawSentence

_HEADER = ("text", "entity_a", "entity_b", "label")

_LABELS = {
    "positive": Polarity.POSITIVE,
    "negative": Polarity.NEGATIVE,
    "neutral": Polarity.NEUTRAL,
    "none": Polarity.NEUTRAL,
}


def parse_ersa(data: bytes) -> list[RawSentence]:
    """Parse TSV rows, one sentence with an entity pair per row."""
    reader = csv.reader(io.StringIO(data.decode("utf-8")), delimiter="\t")
    sentences: list[RawSentence] = []
    for lineno, row in enumerate(reader, start=1):
        if not row or (lineno == 1 and tuple(c.strip().lower() for c in row) == _HEADER):
            continue
        if len(row) < 4:
            raise CorpusError(f"row {lineno}: expected 4 columns, got {len(row)}")
        text, a1, a2, label = (c.strip() for c in row[:4])
        if not label:
            raise CorpusError(f"row {lineno}: missing label")
        if label.lower() not in _LABELS:
            raise CorpusError(f"row {lineno}: unknown label {label!r}")
        if a1.lower() == a2.lower():
            raise CorpusError(f"row {lineno}: entity pair must be distinct, got {a1!r} twice")
        polarity = _LABELS[label.lower()]
        sentences.append(
            RawSentence(
                id=f"ersa-{lineno}",
                text=text,
                aspects=[
                    AspectAnnotation(term=a1, span=_find(text, a1), polarity=polarity),
                    AspectAnnotation(term=a2, span=_find(text, a2), polarity=polarity),
                ],
                domain="biomedical",
                source_dataset="ERSA",
            )
        )
    return sentences


def _find(text: str, entity: str) -> tuple[int, int] | None:
    pos = text.lower().find(entity.lower())
    if pos < 0:
        return None
    return (pos, pos + len(entity))
