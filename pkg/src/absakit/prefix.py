"""Prefix prompt construction and per-instance applicability.

Three prefix variants exist besides running with no prefix at all: an
entity-recognition instruction, a relation-extraction instruction over a
pair of aspects, and a noise prefix of random words. The prefixes only
instruct; nothing here solves the auxiliary task.
"""

from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .types import ConfigError, Subtask, TaskInstance, normalize_term

NER_TEMPLATE = (
    "Definition: Given the following context, output the relevant entities in it. "
    "Reason the answer step-by-step. Context: {text}"
)

RE_TEMPLATE = (
    "Definition: Solve a relation extraction (RE) task. Given the context, output "
    "the most precise semantic relation between the entities '{a1}' and '{a2}'. "
    "In cases where there is no relationship the output should be NONE. "
    "Reason the answer step-by-step. Context: {text}"
)

DEFAULT_NOISE_WORD_COUNT = 50

_WORD_RE = re.compile(r"[a-z][a-z'-]*$")


class PrefixKind(str, enum.Enum):
    NO_PREFIX = "NoPrefix"
    NER = "NER"
    RE = "RE"
    NOISE = "Noise"


@dataclass(frozen=True)
class PrefixSpec:
    kind: PrefixKind
    entity_pair: tuple[str, str] | None = None
    noise_seed: int | None = None
    noise_word_count: int = DEFAULT_NOISE_WORD_COUNT

    def __post_init__(self):
        if self.kind == PrefixKind.RE:
            if self.entity_pair is None:
                raise ConfigError("RE prefix requires an entity pair")
            a1, a2 = self.entity_pair
            if normalize_term(a1) == normalize_term(a2):
                raise ConfigError("RE entity pair must be distinct")
        elif self.kind == PrefixKind.NOISE:
            if self.noise_seed is None:
                raise ConfigError("Noise prefix requires a seed")
        elif self.entity_pair is not None:
            raise ConfigError(f"{self.kind.value} prefix carries no entity pair")


@dataclass(frozen=True)
class NoiseVocabulary:
    words: tuple[str, ...]
    source_id: str

    def __post_init__(self):
        if not self.words:
            raise ConfigError("noise vocabulary is empty")
        if len(set(self.words)) != len(self.words):
            raise ConfigError("noise vocabulary contains duplicates")
        for w in self.words:
            if not _WORD_RE.match(w):
                raise ConfigError(f"invalid vocabulary word {w!r}")


def load_noise_vocabulary(path: Path | None = None) -> NoiseVocabulary:
    """Load the word list; defaults to the vocabulary shipped with the package.

    File format: one word per line, UTF-8, `#` comment lines ignored.
    """
    if path is None:
        text = resources.files("absakit.data").joinpath("noise_words.txt").read_text("utf-8")
        source_id = "absakit-builtin-v1"
    else:
        text = Path(path).read_text("utf-8")
        source_id = str(path)
    words = [ln.strip() for ln in text.splitlines()]
    words = [w for w in words if w and not w.startswith("#")]
    return NoiseVocabulary(words=tuple(words), source_id=source_id)


def build_ner_prefix(text: str) -> str:
    if not text:
        raise ValueError("prefix context text is empty")
    return NER_TEMPLATE.format(text=text)


def build_re_prefix(text: str, a1: str, a2: str) -> str:
    if not text:
        raise ValueError("prefix context text is empty")
    if normalize_term(a1) == normalize_term(a2):
        raise ValueError(f"entities must be distinct, got {a1!r} twice")
    lowered = text.lower()
    for entity in (a1, a2):
        if normalize_term(entity) not in lowered:
            raise ValueError(f"entity {entity!r} not found in text")
    return RE_TEMPLATE.format(text=text, a1=a1, a2=a2)


def build_noise_prefix(
    vocab: NoiseVocabulary, seed: int, word_count: int = DEFAULT_NOISE_WORD_COUNT
) -> str:
    """`Definition: ` followed by word_count words sampled with replacement.

    Sampling uses the Mersenne Twister (python stdlib `random.Random`) seeded
    with `seed`, drawing one `randrange(len(words))` index per word, so the
    output is reproducible across runs and platforms.
    """
    if word_count < 1:
        raise ValueError("word_count must be >= 1")
    rng = random.Random(seed)
    picks = [vocab.words[rng.randrange(len(vocab.words))] for _ in range(word_count)]
    return "Definition: " + " ".join(picks)


def build_prefix(spec: PrefixSpec, text: str, vocab: NoiseVocabulary | None = None) -> str | None:
    """Render a prefix spec against an instance text; None for NoPrefix."""
    if spec.kind == PrefixKind.NO_PREFIX:
        return None
    if spec.kind == PrefixKind.NER:
        return build_ner_prefix(text)
    if spec.kind == PrefixKind.RE:
        a1, a2 = spec.entity_pair
        return build_re_prefix(text, a1, a2)
    if vocab is None:
        vocab = load_noise_vocabulary()
    return build_noise_prefix(vocab, spec.noise_seed, spec.noise_word_count)


#: subtasks whose input includes target aspects, a precondition for RE
_RE_SUBTASKS = {Subtask.ATSC, Subtask.AOOE, Subtask.ERSA}


def applicable_prefixes(instance: TaskInstance) -> set[PrefixKind]:
    """Prefix kinds valid for one instance.

    NoPrefix, NER and Noise always apply. RE applies only when the subtask
    provides aspects as input (so not ATE, and not the neighbourhood ATSC
    variant, whose second target is a category rather than an entity) and
    the sentence carries at least two distinct aspects.
    """
    kinds = {PrefixKind.NO_PREFIX, PrefixKind.NER, PrefixKind.NOISE}
    if instance.subtask in _RE_SUBTASKS and instance.distinct_aspect_count() >= 2:
        kinds.add(PrefixKind.RE)
    return kinds


def select_re_pair(instance: TaskInstance) -> tuple[str, str]:
    """Pick the entity pair for an RE prefix.

    ERSA instances use their annotated pair verbatim. For single-target
    subtasks the pair is (target, nearest other aspect by character offset),
    ties broken by the leftmost candidate.
    """
    if PrefixKind.RE not in applicable_prefixes(instance):
        raise ValueError(f"RE prefix not applicable to {instance.instance_id}")
    if instance.subtask == Subtask.ERSA:
        a1, a2 = instance.target_aspects
        return (a1, a2)

    target = instance.target_aspects[0]
    target_norm = normalize_term(target)
    anchor = instance.target_span[0] if instance.target_span else None
    candidates = []
    for term, start in instance.sentence_aspects:
        if normalize_term(term) == target_norm:
            continue
        if anchor is not None and start is not None:
            distance = abs(start - anchor)
        else:
            distance = 0
        candidates.append((distance, start if start is not None else 0, term))
    if not candidates:
        raise ValueError(f"no second aspect available for {instance.instance_id}")
    candidates.sort(key=lambda c: (c[0], c[1]))
    return (target, candidates[0][2])
