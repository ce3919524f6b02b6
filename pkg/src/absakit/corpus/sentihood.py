"""Parser for neighbourhood-review annotations (JSON with opinions).

Input is a JSON array of objects {id, text, opinions: [{target_entity,
aspect, sentiment}]}. Texts use LOCATION1/LOCATION2 placeholders for the
entities under discussion. One raw sentence is emitted per (sentence,
entity, aspect category) annotation.
"""

from __future__ import annotations

import json
import logging

from ..types import AspectAnnotation, CorpusError, Polarity, RawSentence

log = logging.getLogger(__name__)

_SENTIMENTS = {
    "positive": Polarity.POSITIVE,
    "negative": Polarity.NEGATIVE,
    "neutral": Polarity.NEUTRAL,
}


def parse_sentihood(data: bytes) -> list[RawSentence]:
    try:
        rows = json.loads(data.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed JSON: {exc}") from exc
    if not isinstance(rows, list):
        raise CorpusError("expected a JSON array of sentence objects")

    sentences: list[RawSentence] = []
    for i, row in enumerate(rows):
        text = row.get("text", "")
        if not text:
            raise CorpusError(f"row {i}: missing text")
        sid = str(row.get("id", i))
        for j, op in enumerate(row.get("opinions", [])):
            entity = op.get("target_entity")
            if not entity:
                raise CorpusError(f"row {i} opinion {j}: missing target entity")
            category = op.get("aspect")
            sentiment = op.get("sentiment", "").lower()
            if sentiment not in _SENTIMENTS:
                raise CorpusError(f"row {i} opinion {j}: unknown sentiment {sentiment!r}")
            if entity not in text:
                log.warning("sentence %s: entity %s not found in text, keeping row", sid, entity)
            pos = text.find(entity)
            sentences.append(
                RawSentence(
                    id=f"{sid}-{j}",
                    text=text,
                    aspects=[
                        AspectAnnotation(
                            term=entity,
                            span=(pos, pos + len(entity)) if pos >= 0 else None,
                            polarity=_SENTIMENTS[sentiment],
                            category=category,
                        )
                    ],
                    domain="neighbourhoods",
                    source_dataset="SentiHood",
                )
            )
    return sentences
