"""Projection of character-level annotations onto token spans."""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field

from ..errors import UndefinedRateError, ValidationError
from .corpus import RawDocument
from .latex import identity_map, latex_to_text, project_span
from .tokenize import TokenizedDocument

log = logging.getLogger(__name__)

TokenSpan = tuple[int, int]


@dataclass
class AlignedDocument:
    doc: RawDocument
    tok: TokenizedDocument
    entity_spans: dict[str, TokenSpan]
    mismatch: dict[str, bool]
    dropped: list[str] = field(default_factory=list)

    @property
    def gold_mentions(self) -> list[tuple[TokenSpan, str]]:
        """Deduplicated (token span, entity type); the first annotation wins."""
        seen = {}
        for ent in self.doc.entities:
            span = self.entity_spans.get(ent.id)
            if span is not None and span not in seen:
                seen[span] = ent.type
        return list(seen.items())

    @property
    def gold_relations(self) -> list[tuple[TokenSpan, TokenSpan, str]]:
        rels = []
        for rel in self.doc.relations:
            head = self.entity_spans.get(rel.head)
            tail = self.entity_spans.get(rel.tail)
            if head is None or tail is None or head == tail:
                continue
            rels.append((head, tail, rel.type))
        return rels


def char_to_token_span(tok: TokenizedDocument, start: int, end: int) -> tuple[TokenSpan, bool]:
    """Minimal token span covering ``[start, end)`` in ``tok.text`` coordinates.

    The flag is true when a boundary falls strictly inside a token, in which
    case the span is widened to the covering token.
    """
    if not 0 <= start < end <= len(tok.text):
        raise ValidationError(f"span [{start}, {end}) outside text of length {len(tok.text)}")
    ends = [hi for _, hi in tok.offsets]
    starts = [lo for lo, _ in tok.offsets]
    first = bisect.bisect_right(ends, start)
    last = bisect.bisect_left(starts, end) - 1
    if first > last:
        raise ValidationError(f"span [{start}, {end}) covers no token")
    mismatch = starts[first] < start or ends[last] > end
    return (first, last + 1), mismatch


def align_annotations(doc: RawDocument, tok: TokenizedDocument) -> AlignedDocument:
    """Align every entity of ``doc`` to the tokens of ``tok``.

    Annotations are given in original-text offsets; they are first projected
    through ``tok.char_map`` when the tokenized text was preprocessed.
    Entities whose characters were all removed by preprocessing are dropped.
    """
    spans, flags, dropped = {}, {}, []
    for ent in doc.entities:
        if ent.end > len(doc.text):
            raise ValidationError(
                f"document {doc.id!r}: entity {ent.id!r} exceeds text length {len(doc.text)}"
            )
        projected = project_span(tok.char_map, ent.start, ent.end)
        if projected is None:
            dropped.append(ent.id)
            continue
        try:
            spans[ent.id], flags[ent.id] = char_to_token_span(tok, *projected)
        except ValidationError:
            dropped.append(ent.id)
    if dropped:
        log.warning("document %s: %d annotation(s) not representable after tokenization",
                    doc.id, len(dropped))
    return AlignedDocument(doc, tok, spans, flags, dropped)


def prepare_document(doc: RawDocument, tokenizer, preprocess: str = "none") -> AlignedDocument:
    """Optionally strip LaTeX, tokenize and align ``doc``."""
    if preprocess == "latex2text":
        clean, char_map = latex_to_text(doc.text)
    elif preprocess == "none":
        clean, char_map = doc.text, identity_map(doc.text)
    else:
        raise ValueError(f"unknown preprocess mode {preprocess!r}")
    tok = tokenizer.tokenize(clean)
    tok.char_map = char_map
    return align_annotations(doc, tok)


@dataclass
class MismatchReport:
    relations: int
    any_mismatch: int
    both_mismatch: int

    @property
    def rate(self) -> float:
        return self.any_mismatch / self.relations

    @property
    def both_rate(self) -> float:
        return self.both_mismatch / self.relations


def boundary_mismatch_report(aligned: list[AlignedDocument]) -> MismatchReport:
    total = anym = both = 0
    for adoc in aligned:
        for rel in adoc.doc.relations:
            total += 1
            h = adoc.mismatch.get(rel.head, False)
            t = adoc.mismatch.get(rel.tail, False)
            anym += h or t
            both += h and t
    if total == 0:
        raise UndefinedRateError("mismatch rate undefined: corpus has no relation instances")
    return MismatchReport(total, anym, both)
