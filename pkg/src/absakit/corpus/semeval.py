"""Parsers for the SemEval customer-review XML distributions.

Two schemas are handled:
  * 2014: <sentences><sentence><text/><aspectTerms><aspectTerm .../>
  * 2015/16: <Reviews><Review><sentences><sentence><text/><Opinions><Opinion .../>

An optional ``opinion`` attribute on aspectTerm/Opinion elements is passed
through when present; the stock distributions do not carry it, but the
aspect-opinion subtask needs opinion terms from augmented files.
"""

from __future__ import annotations

import io
import xml.etree.ElementTree as ET

from ..types import (
    AspectAnnotation,
    CorpusError,
    DATASET_DOMAIN,
    Polarity,
    RawSentence,
)

_POLARITIES = {p.value: p for p in Polarity}


def _parse_polarity(value: str, where: str) -> Polarity:
    try:
        return _POLARITIES[value]
    except KeyError:
        raise CorpusError(f"{where}: unknown polarity {value!r}") from None


def _load_root(data: bytes) -> ET.Element:
    try:
        return ET.parse(io.BytesIO(data)).getroot()
    except ET.ParseError as exc:
        line, col = exc.position
        raise CorpusError(f"malformed XML at line {line}, column {col}: {exc.msg}") from exc


def _span(elem, text, sid) -> tuple[int, int] | None:
    if elem.get("from") is None or elem.get("to") is None:
        return None
    start, end = int(elem.get("from")), int(elem.get("to"))
    if start == end == 0:
        return None  # NULL-target convention in 2015/16 files
    if not (0 <= start < end <= len(text)):
        raise CorpusError(f"sentence {sid}: span ({start}, {end}) outside text")
    return (start, end)


def parse_semeval_xml(data: bytes, dataset: str) -> list[RawSentence]:
    """Parse a SemEval XML file into raw sentences, schema auto-detected."""
    root = _load_root(data)
    domain = DATASET_DOMAIN.get(dataset, "restaurants")
    sentences: list[RawSentence] = []
    if root.tag == "sentences":
        sentence_elems = list(root.iter("sentence"))
        parse_aspects = _aspects_2014
    elif root.tag == "Reviews":
        sentence_elems = list(root.iter("sentence"))
        parse_aspects = _aspects_2015
    else:
        raise CorpusError(f"unrecognized root element <{root.tag}>")

    for elem in sentence_elems:
        sid = elem.get("id", f"s{len(sentences)}")
        text_elem = elem.find("text")
        text = text_elem.text if text_elem is not None else None
        if not text:
            raise CorpusError(f"sentence {sid}: missing text")
        sentences.append(
            RawSentence(
                id=sid,
                text=text,
                aspects=parse_aspects(elem, text, sid),
                domain=domain,
                source_dataset=dataset,
            )
        )
    return sentences


def _aspects_2014(sentence_elem, text, sid) -> list[AspectAnnotation]:
    aspects = []
    for term_elem in sentence_elem.iter("aspectTerm"):
        term = term_elem.get("term")
        if term is None:
            raise CorpusError(f"sentence {sid}: aspectTerm without term attribute")
        aspects.append(
            AspectAnnotation(
                term=term,
                span=_span(term_elem, text, sid),
                polarity=_parse_polarity(term_elem.get("polarity", "none"), f"sentence {sid}"),
                opinion_term=term_elem.get("opinion"),
            )
        )
    return aspects


def _aspects_2015(sentence_elem, text, sid) -> list[AspectAnnotation]:
    aspects = []
    for op_elem in sentence_elem.iter("Opinion"):
        target = op_elem.get("target")
        if target is None or target == "NULL":
            continue  # implicit targets carry no aspect term
        aspects.append(
            AspectAnnotation(
                term=target,
                span=_span(op_elem, text, sid),
                polarity=_parse_polarity(op_elem.get("polarity", "none"), f"sentence {sid}"),
                opinion_term=op_elem.get("opinion"),
                category=op_elem.get("category"),
            )
        )
    return aspects
