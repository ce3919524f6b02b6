"""Derivation of evaluable task instances from raw annotated sentences."""

from __future__ import annotations

from ..types import (
    CorpusError,
    ConfigError,
    GoldAnswer,
    Polarity,
    RawSentence,
    Subtask,
    normalize_term,
)
from ..types import TaskInstance


def _sentence_aspects(s: RawSentence) -> list[tuple[str, int | None]]:
    return [(a.term, a.span[0] if a.span else None) for a in s.aspects]


def derive_instances(sentences: list[RawSentence], subtask: Subtask) -> list[TaskInstance]:
    """Expand sentences into per-subtask instances.

    ATE yields one instance per sentence; ATSC/AOOE one per (sentence,
    aspect); ERSA one per entity pair; the neighbourhood ATSC variant one
    per (sentence, entity, category).
    """
    deriver = _DERIVERS.get(subtask)
    if deriver is None:
        raise ConfigError(f"unknown subtask {subtask}")
    instances: list[TaskInstance] = []
    for s in sentences:
        instances.extend(deriver(s))
    return instances


def _derive_ate(s: RawSentence):
    yield TaskInstance(
        instance_id=f"{s.id}:ATE",
        subtask=Subtask.ATE,
        text=s.text,
        target_aspects=[],
        gold=GoldAnswer.term_set(a.term for a in s.aspects),
        sentence_aspects=_sentence_aspects(s),
    )


def _derive_atsc(s: RawSentence):
    for i, a in enumerate(s.aspects):
        if a.polarity == Polarity.CONFLICT:
            raise CorpusError(
                f"sentence {s.id}: conflict-labelled aspect reached ATSC derivation; "
                "run filter_conflict first"
            )
        yield TaskInstance(
            instance_id=f"{s.id}:ATSC:{i}",
            subtask=Subtask.ATSC,
            text=s.text,
            target_aspects=[a.term],
            gold=GoldAnswer.polarity(a.polarity),
            sentence_aspects=_sentence_aspects(s),
            target_span=a.span,
        )


def _derive_aooe(s: RawSentence):
    for i, a in enumerate(s.aspects):
        if a.opinion_term is None:
            continue
        yield TaskInstance(
            instance_id=f"{s.id}:AOOE:{i}",
            subtask=Subtask.AOOE,
            text=s.text,
            target_aspects=[a.term],
            gold=GoldAnswer.opinion(a.opinion_term),
            sentence_aspects=_sentence_aspects(s),
            target_span=a.span,
        )


def _derive_ersa(s: RawSentence):
    if len(s.aspects) != 2:
        raise ConfigError(f"sentence {s.id}: ERSA derivation needs exactly two entities")
    a1, a2 = s.aspects
    yield TaskInstance(
        instance_id=f"{s.id}:ERSA",
        subtask=Subtask.ERSA,
        text=s.text,
        target_aspects=[a1.term, a2.term],
        gold=GoldAnswer.polarity(a1.polarity),
        sentence_aspects=_sentence_aspects(s),
    )


def _derive_sentihood(s: RawSentence):
    for i, a in enumerate(s.aspects):
        if a.category is None:
            raise ConfigError(f"sentence {s.id}: annotation lacks an aspect category")
        yield TaskInstance(
            instance_id=f"{s.id}:SH:{i}",
            subtask=Subtask.SENTIHOOD_ATSC,
            text=s.text,
            target_aspects=[a.term, a.category],
            gold=GoldAnswer.polarity(a.polarity),
            sentence_aspects=_sentence_aspects(s),
            target_span=a.span,
        )


_DERIVERS = {
    Subtask.ATE: _derive_ate,
    Subtask.ATSC: _derive_atsc,
    Subtask.AOOE: _derive_aooe,
    Subtask.ERSA: _derive_ersa,
    Subtask.SENTIHOOD_ATSC: _derive_sentihood,
}
