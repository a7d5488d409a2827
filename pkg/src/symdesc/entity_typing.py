"""Entity types inferred from the relations a span takes part in."""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

# relation type -> (head entity type, tail entity type)
TYPE_MAP = {
    "Direct": ("PRIMARY", "SYMBOL"),
    "Count": ("PRIMARY", "SYMBOL"),
    "Corefer-Symbol": ("SYMBOL", "SYMBOL"),
    "Corefer-Description": ("PRIMARY", "PRIMARY"),
}

# when one span is given several types, the earliest entry here wins
PRECEDENCE = ("SYMBOL", "PRIMARY")


@dataclass(frozen=True)
class TypedMention:
    span: tuple[int, int]
    type: str


@dataclass
class TypingResult:
    mentions: list[TypedMention] = field(default_factory=list)
    conflicts: int = 0

    def type_of(self, span):
        for m in self.mentions:
            if m.span == tuple(span):
                return m.type
        return None


def assign_entity_types(preds) -> TypingResult:
    """Type every span that occurs in ``preds``.

    A span used as SYMBOL anywhere is typed SYMBOL. A PRIMARY span heading
    two or more Direct relations becomes ORDERED. Mentions come back sorted
    by span.
    """
    votes = defaultdict(set)
    direct_heads = Counter()
    for p in preds:
        head_type, tail_type = TYPE_MAP[p.type]
        votes[tuple(p.head)].add(head_type)
        votes[tuple(p.tail)].add(tail_type)
        if p.type == "Direct":
            direct_heads[tuple(p.head)] += 1

    result = TypingResult()
    for span in sorted(votes):
        types = votes[span]
        if len(types) > 1:
            result.conflicts += 1
            log.debug("span %s typed %s; resolving by precedence", span, sorted(types))
        chosen = next(t for t in PRECEDENCE if t in types)
        if chosen == "PRIMARY" and direct_heads[span] >= 2:
            chosen = "ORDERED"
        result.mentions.append(TypedMention(span, chosen))
    return result
