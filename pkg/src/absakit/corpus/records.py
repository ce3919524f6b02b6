"""Canonical newline-delimited record format.

All five sources converge to one schema so prompt assembly never touches the
original distribution formats. Records are JSON objects, one per line, UTF-8,
with sorted keys so serialization is byte-stable.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, TextIO

from ..types import (
    AspectAnnotation,
    GoldAnswer,
    Polarity,
    RawSentence,
    Subtask,
    TaskInstance,
)


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


# -- raw sentences -----------------------------------------------------------

def sentence_to_record(s: RawSentence) -> dict:
    return {
        "id": s.id,
        "text": s.text,
        "domain": s.domain,
        "source_dataset": s.source_dataset,
        "aspects": [
            {
                "term": a.term,
                "span": list(a.span) if a.span else None,
                "polarity": a.polarity.value,
                "opinion_term": a.opinion_term,
                "category": a.category,
            }
            for a in s.aspects
        ],
    }


def sentence_from_record(rec: dict) -> RawSentence:
    return RawSentence(
        id=rec["id"],
        text=rec["text"],
        aspects=[
            AspectAnnotation(
                term=a["term"],
                span=tuple(a["span"]) if a["span"] else None,
                polarity=Polarity(a["polarity"]),
                opinion_term=a.get("opinion_term"),
                category=a.get("category"),
            )
            for a in rec["aspects"]
        ],
        domain=rec["domain"],
        source_dataset=rec["source_dataset"],
    )


# -- task instances ----------------------------------------------------------

def instance_to_record(inst: TaskInstance) -> dict:
    return {
        "id": inst.instance_id,
        "text": inst.text,
        "subtask": inst.subtask.value,
        "targets": list(inst.target_aspects),
        "gold": {
            "kind": inst.gold.kind,
            "terms": list(inst.gold.terms),
            "label": inst.gold.label.value if inst.gold.label else None,
        },
        "sentence_aspects": [[t, s] for t, s in inst.sentence_aspects],
        "target_span": list(inst.target_span) if inst.target_span else None,
    }


def instance_from_record(rec: dict) -> TaskInstance:
    gold = rec["gold"]
    return TaskInstance(
        instance_id=rec["id"],
        subtask=Subtask(rec["subtask"]),
        text=rec["text"],
        target_aspects=list(rec["targets"]),
        gold=GoldAnswer(
            kind=gold["kind"],
            terms=tuple(gold["terms"]),
            label=Polarity(gold["label"]) if gold["label"] else None,
        ),
        sentence_aspects=[(t, s) for t, s in rec.get("sentence_aspects", [])],
        target_span=tuple(rec["target_span"]) if rec.get("target_span") else None,
    )


# -- file IO -----------------------------------------------------------------

def write_records(path: Path, records: Iterable[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(_dumps(rec) + "\n")


def read_records(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_sentences(path: Path, sentences: Iterable[RawSentence]) -> None:
    write_records(path, (sentence_to_record(s) for s in sentences))


def read_sentences(path: Path) -> list[RawSentence]:
    return [sentence_from_record(r) for r in read_records(path)]


def write_instances(path: Path, instances: Iterable[TaskInstance]) -> None:
    write_records(path, (instance_to_record(i) for i in instances))


def read_instances(path: Path) -> list[TaskInstance]:
    return [instance_from_record(r) for r in read_records(path)]
