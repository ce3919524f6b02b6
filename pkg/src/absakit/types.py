"""Core domain types shared across the toolkit."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Subtask(str, enum.Enum):
    ATE = "ATE"
    ATSC = "ATSC"
    AOOE = "AOOE"
    ERSA = "ERSA"
    SENTIHOOD_ATSC = "SentiHoodATSC"


class Polarity(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    CONFLICT = "conflict"
    NONE = "none"


#: datasets understood by the corpus parsers, keyed by id
DATASETS = ("Lapt14", "Rest14", "Rest15", "Rest16", "Hotel15", "ERSA", "SentiHood")

SEMEVAL_DATASETS = ("Lapt14", "Rest14", "Rest15", "Rest16", "Hotel15")

DATASET_DOMAIN = {
    "Lapt14": "laptops",
    "Rest14": "restaurants",
    "Rest15": "restaurants",
    "Rest16": "restaurants",
    "Hotel15": "hotels",
    "ERSA": "biomedical",
    "SentiHood": "neighbourhoods",
}

#: subtasks each dataset supports
DATASET_SUBTASKS = {
    "Lapt14": (Subtask.ATE, Subtask.ATSC, Subtask.AOOE),
    "Rest14": (Subtask.ATE, Subtask.ATSC, Subtask.AOOE),
    "Rest15": (Subtask.ATE, Subtask.ATSC, Subtask.AOOE),
    "Rest16": (Subtask.ATE, Subtask.ATSC, Subtask.AOOE),
    "Hotel15": (Subtask.ATE, Subtask.ATSC, Subtask.AOOE),
    "ERSA": (Subtask.ERSA,),
    "SentiHood": (Subtask.SENTIHOOD_ATSC,),
}

CLASSIFICATION_SUBTASKS = (Subtask.ATSC, Subtask.ERSA, Subtask.SENTIHOOD_ATSC)
EXTRACTION_SUBTASKS = (Subtask.ATE, Subtask.AOOE)


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus inputs."""


class ConfigError(ValueError):
    """Raised for invalid experiment or pipeline configuration."""


def normalize_term(term: str) -> str:
    """Lowercase, trim and collapse internal whitespace."""
    return " ".join(term.lower().split())


@dataclass(frozen=True)
class AspectAnnotation:
    term: str
    span: tuple[int, int] | None = None
    polarity: Polarity = Polarity.NONE
    opinion_term: str | None = None
    category: str | None = None


@dataclass
class RawSentence:
    id: str
    text: str
    aspects: list[AspectAnnotation]
    domain: str
    source_dataset: str

    def __post_init__(self):
        if not self.text:
            raise CorpusError(f"sentence {self.id}: empty text")
        for a in self.aspects:
            if a.span is not None:
                start, end = a.span
                if not (0 <= start < end <= len(self.text)):
                    raise CorpusError(
                        f"sentence {self.id}: span {a.span} outside text bounds"
                    )


@dataclass(frozen=True)
class GoldAnswer:
    kind: str  # "TermSet" | "PolarityLabel" | "OpinionTerm"
    terms: tuple[str, ...] = ()
    label: Polarity | None = None

    @staticmethod
    def term_set(terms) -> "GoldAnswer":
        seen: dict[str, None] = {}
        for t in terms:
            n = normalize_term(t)
            if n:
                seen[n] = None
        return GoldAnswer(kind="TermSet", terms=tuple(seen))

    @staticmethod
    def polarity(label: Polarity) -> "GoldAnswer":
        return GoldAnswer(kind="PolarityLabel", label=label)

    @staticmethod
    def opinion(term: str) -> "GoldAnswer":
        n = normalize_term(term)
        return GoldAnswer(kind="OpinionTerm", terms=(n,) if n else ())

    def render(self) -> str:
        """The string a perfect generation would produce for this answer."""
        if self.kind == "PolarityLabel":
            return self.label.value
        if not self.terms:
            return "noaspectterm" if self.kind == "TermSet" else "none"
        return ", ".join(self.terms)


@dataclass
class TaskInstance:
    instance_id: str
    subtask: Subtask
    text: str
    target_aspects: list[str]
    gold: GoldAnswer
    # all aspect terms of the source sentence with their character offsets,
    # needed for RE applicability and pair selection
    sentence_aspects: list[tuple[str, int | None]] = field(default_factory=list)
    target_span: tuple[int, int] | None = None

    def __post_init__(self):
        n = len(self.target_aspects)
        if self.subtask == Subtask.ATE and n != 0:
            raise CorpusError("ATE instances carry no target aspects")
        if self.subtask in (Subtask.ATSC, Subtask.AOOE) and n != 1:
            raise CorpusError(f"{self.subtask.value} instances need exactly one target aspect")
        if self.subtask in (Subtask.ERSA, Subtask.SENTIHOOD_ATSC) and n != 2:
            raise CorpusError(f"{self.subtask.value} instances need exactly two targets")
        if self.subtask == Subtask.ERSA:
            a1, a2 = self.target_aspects
            if normalize_term(a1) == normalize_term(a2):
                raise CorpusError("ERSA targets must be distinct")

    def distinct_aspect_count(self) -> int:
        return len({normalize_term(t) for t, _ in self.sentence_aspects})


@dataclass
class DatasetSplit:
    train: list[TaskInstance]
    validation: list[TaskInstance]
    test: list[TaskInstance]
    provenance: dict = field(default_factory=dict)
