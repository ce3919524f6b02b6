"""Output parsing and metric computation.

Classification subtasks are scored with macro-averaged F1 over the classes
present in the gold labels; extraction subtasks with pooled (micro)
exact-match term F1. Multi-seed runs are aggregated as arithmetic mean and
population standard deviation, reported as ``mean±std`` scaled to 100.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from .types import GoldAnswer, Polarity, normalize_term

_EMPTY_MARKERS = {"noaspectterm", "none"}

DEFAULT_CLASSES = (Polarity.POSITIVE, Polarity.NEGATIVE, Polarity.NEUTRAL)


@dataclass(frozen=True)
class Prediction:
    instance_id: str
    raw_text: str
    parsed: GoldAnswer
    parse_status: str  # "ok" | "fallback" | "unparseable"


@dataclass
class MetricFragment:
    dataset: str
    subtask: str
    prefix_kind: str
    seed: int
    precision: float
    recall: float
    f1: float
    per_class: dict[str, dict[str, float]] | None = None


@dataclass
class MetricReport:
    dataset: str
    subtask: str
    prefix_kind: str
    per_seed_f1: list[tuple[int, float]]
    mean_f1: float
    std_f1: float
    per_class: dict | None = None

    def formatted(self) -> str:
        return f"{self.mean_f1 * 100:.2f}±{self.std_f1 * 100:.2f}"


# -- output parsing (total: never raises) -------------------------------------

def parse_extraction_output(raw: str) -> GoldAnswer:
    """Comma-split, normalize, dedup; empty-set markers yield the empty set."""
    normalized = normalize_term(raw)
    if normalized in _EMPTY_MARKERS:
        return GoldAnswer(kind="TermSet", terms=())
    terms: dict[str, None] = {}
    for piece in raw.split(","):
        term = normalize_term(piece)
        if term and term not in _EMPTY_MARKERS:
            terms[term] = None
    return GoldAnswer(kind="TermSet", terms=tuple(terms))


def parse_classification_output(raw: str, classes=DEFAULT_CLASSES) -> tuple[Polarity | None, str]:
    """Parse a generated label; returns (label or None, parse_status).

    Exact normalized match wins; otherwise the class name occurring earliest
    as a substring is taken as a flagged fallback; otherwise unparseable.
    """
    if not classes:
        raise ValueError("classes must be non-empty")
    normalized = normalize_term(raw)
    for cls in classes:
        if normalized == cls.value:
            return cls, "ok"
    hits = [(normalized.find(cls.value), cls) for cls in classes if cls.value in normalized]
    if hits:
        hits.sort(key=lambda h: h[0])
        return hits[0][1], "fallback"
    return None, "unparseable"


def predict_from_raw(instance_id: str, raw: str, gold_kind: str, classes=DEFAULT_CLASSES) -> Prediction:
    """Build a Prediction for raw generated text given the gold answer shape."""
    if gold_kind == "PolarityLabel":
        label, status = parse_classification_output(raw, classes)
        parsed = GoldAnswer(kind="PolarityLabel", label=label)
        return Prediction(instance_id, raw, parsed, status)
    parsed = parse_extraction_output(raw)
    parsed = GoldAnswer(kind=gold_kind, terms=parsed.terms)
    return Prediction(instance_id, raw, parsed, "ok")


# -- scoring -------------------------------------------------------------------

def _align(predictions: list[Prediction], golds: dict[str, GoldAnswer]):
    pred_ids = {p.instance_id for p in predictions}
    if pred_ids != set(golds):
        missing = set(golds) - pred_ids
        extra = pred_ids - set(golds)
        raise ValueError(f"prediction/gold id mismatch: missing={sorted(missing)[:5]} extra={sorted(extra)[:5]}")


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def term_set_f1(predictions: list[Prediction], golds: dict[str, GoldAnswer]) -> tuple[float, float, float]:
    """Pooled exact-match term F1: (precision, recall, f1)."""
    _align(predictions, golds)
    tp = n_pred = n_gold = 0
    for p in predictions:
        gold_terms = set(golds[p.instance_id].terms)
        pred_terms = set(p.parsed.terms)
        tp += len(pred_terms & gold_terms)
        n_pred += len(pred_terms)
        n_gold += len(gold_terms)
    precision = _safe_div(tp, n_pred)
    recall = _safe_div(tp, n_gold)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    return precision, recall, f1


def macro_f1(
    predictions: list[Prediction], golds: dict[str, GoldAnswer], classes=DEFAULT_CLASSES
) -> tuple[float, dict[str, dict[str, float]]]:
    """Macro-F1 over classes present in gold; unparseable counts as wrong.

    Returns (macro_f1, per_class) where per_class maps class name to
    precision/recall/f1 from one-vs-rest counts.
    """
    _align(predictions, golds)
    counts = {cls: {"tp": 0, "fp": 0, "fn": 0} for cls in classes}
    present = set()
    for p in predictions:
        gold = golds[p.instance_id].label
        pred = p.parsed.label
        present.add(gold)
        if pred == gold:
            if gold in counts:
                counts[gold]["tp"] += 1
        else:
            if gold in counts:
                counts[gold]["fn"] += 1
            if pred in counts:  # None (unparseable) adds no false positive
                counts[pred]["fp"] += 1
    per_class = {}
    f1s = []
    for cls in classes:
        c = counts[cls]
        precision = _safe_div(c["tp"], c["tp"] + c["fp"])
        recall = _safe_div(c["tp"], c["tp"] + c["fn"])
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_class[cls.value] = {"precision": precision, "recall": recall, "f1": f1}
        if cls in present:
            f1s.append(f1)
    return (statistics.fmean(f1s) if f1s else 0.0), per_class


def aggregate_seeds(fragments: list[MetricFragment]) -> MetricReport:
    """Mean and population std of per-seed F1 for one configuration."""
    if not fragments:
        raise ValueError("no fragments to aggregate")
    keys = {(f.dataset, f.subtask, f.prefix_kind) for f in fragments}
    if len(keys) != 1:
        raise ValueError(f"mixed configurations in aggregation: {sorted(keys)}")
    dataset, subtask, prefix_kind = keys.pop()
    per_seed = [(f.seed, f.f1) for f in fragments]
    values = [f.f1 for f in fragments]
    mean = statistics.fmean(values)
    std = statistics.pstdev(values)
    return MetricReport(
        dataset=dataset,
        subtask=subtask,
        prefix_kind=prefix_kind,
        per_seed_f1=per_seed,
        mean_f1=mean,
        std_f1=std,
    )
