"""Scoring: SemEval-2013 style NER modes, relation P/R/F1, IOU relaxation, recall@k."""

from __future__ import annotations

import csv
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field

from .errors import ConfigError, UndefinedRateError
from .labels import RELATION_TYPES
from .mention import rank_spans

NER_MODES = ("strict", "exact", "partial", "type")


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _ratio(num, den):
    return num / den if den else 0.0


def span_iou(a, b) -> float:
    """Intersection over union of two half-open index spans."""
    inter = max(0, min(a[1], b[1]) - max(a[0], b[0]))
    union = (a[1] - a[0]) + (b[1] - b[0]) - inter
    return inter / union if union else 0.0


def _overlap(a, b):
    return a[0] < b[1] and b[0] < a[1]


# --------------------------------------------------------------------------
# NER

@dataclass
class PRF:
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0


@dataclass
class NerScores:
    strict: PRF
    exact: PRF
    partial: PRF
    type: PRF
    counts: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def ner_counts(pred, gold) -> dict[str, Counter]:
    """Outcome counts for one document.

    ``pred`` and ``gold`` are lists of ``(start, end, type)``. Each prediction
    is compared with the first gold mention that shares its boundaries or
    overlaps it, as in the SemEval-2013 Task 9.1 scorer.
    """
    counts = {mode: Counter() for mode in NER_MODES}
    gold = [tuple(g) for g in gold]
    gold_set = set(gold)
    touched = set()

    def record(**outcome):
        for mode, what in outcome.items():
            counts[mode][what] += 1

    for p in map(tuple, pred):
        if p in gold_set:
            record(strict="correct", exact="correct", partial="correct", type="correct")
            touched.add(p)
            continue
        for g in gold:
            if g[:2] == p[:2]:
                touched.add(g)
                record(strict="incorrect", exact="correct", partial="correct", type="incorrect")
                break
            if _overlap(g, p):
                touched.add(g)
                type_ok = "correct" if g[2] == p[2] else "incorrect"
                record(strict="incorrect", exact="incorrect", partial="partial", type=type_ok)
                break
        else:
            record(strict="spurious", exact="spurious", partial="spurious", type="spurious")

    missed = sum(1 for g in gold if g not in touched)
    for mode in NER_MODES:
        counts[mode]["missed"] += missed
    return counts


def _ner_prf(c: Counter, partial_credit: bool) -> PRF:
    possible = c["correct"] + c["incorrect"] + c["partial"] + c["missed"]
    actual = c["correct"] + c["incorrect"] + c["partial"] + c["spurious"]
    hits = c["correct"] + (0.5 * c["partial"] if partial_credit else 0)
    p, r = _ratio(hits, actual), _ratio(hits, possible)
    return PRF(p, r, f1_score(p, r))


def ner_evaluate(pred_docs, gold_docs) -> NerScores:
    """Micro-averaged scores over aligned per-document mention lists."""
    if len(pred_docs) != len(gold_docs):
        raise ValueError("prediction and gold document counts differ")
    total = {mode: Counter() for mode in NER_MODES}
    for pred, gold in zip(pred_docs, gold_docs):
        for mode, c in ner_counts(pred, gold).items():
            total[mode].update(c)
    return NerScores(
        strict=_ner_prf(total["strict"], False),
        exact=_ner_prf(total["exact"], False),
        partial=_ner_prf(total["partial"], True),
        type=_ner_prf(total["type"], True),
        counts={mode: dict(c) for mode, c in total.items()},
    )


# --------------------------------------------------------------------------
# Relations

@dataclass
class MatchSpec:
    mode: str = "strict"
    threshold: float | None = None

    def __post_init__(self):
        if self.mode not in ("strict", "iou"):
            raise ConfigError(f"unknown match mode {self.mode!r}")
        if self.mode == "iou":
            if self.threshold is None:
                raise ConfigError("iou matching needs a threshold")
            if not 0 < self.threshold <= 1:
                raise ConfigError(f"iou threshold must lie in (0, 1], got {self.threshold}")


@dataclass
class EvalDocument:
    """Relations and mentions of one document in a common span unit.

    ``relations`` holds ``(head, tail, type, score)``; gold documents may use
    any score. ``project`` optionally maps a span to the unit used for IOU
    (e.g. characters to covering tokens).
    """

    id: str
    relations: list = field(default_factory=list)
    mentions: list = field(default_factory=list)
    domain: str = "unknown"
    project: object = None


@dataclass
class ReScores:
    micro: PRF
    macro: PRF
    per_type: dict
    per_domain: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _match_document(pred, gold, match: MatchSpec, project=None):
    """Per-type (tp, n_pred, n_gold) counters for one document."""
    tp, n_pred, n_gold = Counter(), Counter(), Counter()
    preds = {}
    for h, t, typ, *rest in pred:
        key = (tuple(h), tuple(t), typ)
        score = rest[0] if rest else 0.0
        preds[key] = max(score, preds.get(key, -math.inf))
    golds = {(tuple(h), tuple(t), typ) for h, t, typ, *_ in gold}
    for _, _, typ in preds:
        n_pred[typ] += 1
    for _, _, typ in golds:
        n_gold[typ] += 1

    credited = preds.keys() & golds
    for _, _, typ in credited:
        tp[typ] += 1
    if match.mode == "iou":
        proj = project or (lambda s: s)
        open_gold = sorted(g for g in golds if g not in credited)
        leftovers = sorted((k for k in preds if k not in credited),
                           key=lambda k: (-preds[k], k))
        for h, t, typ in leftovers:
            ph, pt = proj(h), proj(t)
            best, best_iou = None, -1.0
            for g in open_gold:
                if g[2] != typ:
                    continue
                ih, it = span_iou(ph, proj(g[0])), span_iou(pt, proj(g[1]))
                if ih > match.threshold and it > match.threshold and min(ih, it) > best_iou:
                    best, best_iou = g, min(ih, it)
            if best is not None:
                open_gold.remove(best)
                tp[typ] += 1
    return tp, n_pred, n_gold


def _scores_from_counts(tp, n_pred, n_gold) -> ReScores:
    per_type = {}
    for typ in RELATION_TYPES:
        p, r = _ratio(tp[typ], n_pred[typ]), _ratio(tp[typ], n_gold[typ])
        per_type[typ] = {"precision": p, "recall": r, "f1": f1_score(p, r),
                         "tp": tp[typ], "pred": n_pred[typ], "gold": n_gold[typ]}
    mp = _ratio(sum(tp.values()), sum(n_pred.values()))
    mr = _ratio(sum(tp.values()), sum(n_gold.values()))
    present = [typ for typ in RELATION_TYPES if n_gold[typ] > 0]
    if present:
        macro = PRF(
            sum(per_type[t]["precision"] for t in present) / len(present),
            sum(per_type[t]["recall"] for t in present) / len(present),
            sum(per_type[t]["f1"] for t in present) / len(present),
        )
    else:
        macro = PRF()
    return ReScores(PRF(mp, mr, f1_score(mp, mr)), macro, per_type)


def re_evaluate(pred_docs, gold_docs, match: MatchSpec | None = None) -> ReScores:
    """Relation scores over documents paired by id.

    Gold documents without a prediction count as empty predictions.
    """
    match = match or MatchSpec()
    pred_by_id = {d.id: d for d in pred_docs}
    totals = [Counter(), Counter(), Counter()]
    by_domain = defaultdict(lambda: [Counter(), Counter(), Counter()])
    for gold in gold_docs:
        pred = pred_by_id.get(gold.id)
        counts = _match_document(pred.relations if pred else [], gold.relations, match,
                                 gold.project)
        for acc, c in zip(totals, counts):
            acc.update(c)
        for acc, c in zip(by_domain[gold.domain], counts):
            acc.update(c)
    scores = _scores_from_counts(*totals)
    for domain, counts in sorted(by_domain.items()):
        sub = _scores_from_counts(*counts)
        scores.per_domain[domain] = {
            "micro_f1": sub.micro.f1,
            "macro_f1": sub.macro.f1,
            "per_type_f1": {t: v["f1"] for t, v in sub.per_type.items() if v["gold"] > 0},
        }
    return scores


def relation_mentions(relations, type_of) -> list[tuple]:
    """Mentions participating in ``relations`` as ``(start, end, type)``."""
    spans = set()
    for h, t, *_ in relations:
        spans.add(tuple(h))
        spans.add(tuple(t))
    return sorted((s[0], s[1], type_of(s)) for s in spans)


# --------------------------------------------------------------------------
# Candidate recall and k sweeps

def entity_recall_hits(scores, spans, gold_spans, k) -> tuple[int, int]:
    gold_spans = set(map(tuple, gold_spans))
    top = {tuple(spans[i]) for i in rank_spans(scores, spans)[:k]}
    return len(gold_spans & top), len(gold_spans)


def entity_recall_at_k(scores, spans, gold_spans, k) -> float:
    """Fraction of gold spans found among the ``k`` best-scored spans."""
    hits, total = entity_recall_hits(scores, spans, gold_spans, k)
    if total == 0:
        raise UndefinedRateError("entity recall undefined without gold spans")
    return hits / total


@dataclass
class SweepRow:
    k: int
    p: float
    r: float
    f: float
    entity_recall: float


def k_sweep(model, aligned_docs, k_values) -> list[SweepRow]:
    """Relation scores and entity recall for each ``k``.

    ``model`` must provide ``score_candidates(aligned_doc)`` returning
    ``(spans, scores, span_embeddings)`` and
    ``relations_for_candidates(span_embeddings, spans, indices)`` returning
    deduplicated relation predictions. Scores are in percent and use
    token-level strict matching against the aligned gold relations.
    """
    k_values = list(k_values)
    if any(k <= 0 for k in k_values) or k_values != sorted(k_values):
        raise ConfigError("k values must be positive and ascending")
    cached = [(adoc, *model.score_candidates(adoc)) for adoc in aligned_docs]
    rows = []
    for k in k_values:
        hits = total = 0
        pred_docs, gold_docs = [], []
        for adoc, spans, scores, emb in cached:
            gold_spans = [s for s, _ in adoc.gold_mentions]
            h, t = entity_recall_hits(scores, spans, gold_spans, k)
            hits, total = hits + h, total + t
            idx = [int(i) for i in rank_spans(scores, spans)[:k]]
            preds = model.relations_for_candidates(emb, spans, idx)
            pred_docs.append(EvalDocument(adoc.doc.id, [(p.head, p.tail, p.type, p.score)
                                                        for p in preds]))
            gold_docs.append(EvalDocument(adoc.doc.id, adoc.gold_relations))
        sc = re_evaluate(pred_docs, gold_docs)
        rows.append(SweepRow(k, 100 * sc.micro.precision, 100 * sc.micro.recall,
                             100 * sc.micro.f1, 100 * _ratio(hits, total)))
    return rows


def write_sweep_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "p", "r", "f", "entity_recall"])
        for row in rows:
            writer.writerow([row.k] + [f"{v:.6f}" for v in (row.p, row.r, row.f, row.entity_recall)])
