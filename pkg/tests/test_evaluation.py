import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symdesc.errors import ConfigError, UndefinedRateError
from symdesc.evaluation import (
    EvalDocument,
    MatchSpec,
    entity_recall_at_k,
    ner_evaluate,
    re_evaluate,
    span_iou,
    write_sweep_csv,
    SweepRow,
)
from symdesc.pipeline import aggregate_runs

TYPES = ["SYMBOL", "PRIMARY", "ORDERED"]
RELS = ["Direct", "Count", "Corefer-Symbol", "Corefer-Description"]


def reference_ner(pred_docs, gold_docs):
    """SemEval-2013 Task 9.1 scoring written from the mode definitions.

    For each prediction, find the first gold entity with identical boundaries
    or any overlap. The outcome per mode then follows from two facts: do the
    boundaries match exactly, and does the type match.
    """
    table = {
        # (same boundaries, same type) -> outcome per mode
        (True, True): dict(strict="COR", exact="COR", partial="COR", type="COR"),
        (True, False): dict(strict="INC", exact="COR", partial="COR", type="INC"),
        (False, True): dict(strict="INC", exact="INC", partial="PAR", type="COR"),
        (False, False): dict(strict="INC", exact="INC", partial="PAR", type="INC"),
    }
    tallies = {m: dict(COR=0, INC=0, PAR=0, MIS=0, SPU=0) for m in ("strict", "exact", "partial", "type")}
    for preds, golds in zip(pred_docs, gold_docs):
        matched = set()
        for ps, pe, pt in preds:
            if (ps, pe, pt) in golds:
                hit = (ps, pe, pt)
            else:
                hit = next((g for g in golds
                            if (g[0], g[1]) == (ps, pe) or (ps < g[1] and g[0] < pe)), None)
            if hit is None:
                for m in tallies:
                    tallies[m]["SPU"] += 1
                continue
            matched.add(hit)
            outcome = table[((hit[0], hit[1]) == (ps, pe), hit[2] == pt)]
            for m, o in outcome.items():
                tallies[m][o] += 1
        for g in golds:
            if g not in matched:
                for m in tallies:
                    tallies[m]["MIS"] += 1
    scores = {}
    for m, c in tallies.items():
        pos = c["COR"] + c["INC"] + c["PAR"] + c["MIS"]
        act = c["COR"] + c["INC"] + c["PAR"] + c["SPU"]
        num = c["COR"] + (0.5 * c["PAR"] if m in ("partial", "type") else 0)
        p = num / act if act else 0.0
        r = num / pos if pos else 0.0
        scores[m] = (p, r, 2 * p * r / (p + r) if p + r else 0.0)
    return scores


def random_mentions(rng, n, length=40):
    out = set()
    for _ in range(n):
        s = int(rng.integers(0, length))
        out.add((s, s + int(rng.integers(1, 5)), TYPES[int(rng.integers(0, 3))]))
    return sorted(out)


def perturb(rng, gold):
    pred = []
    for s, e, t in gold:
        roll = rng.random()
        if roll < 0.3:
            pred.append((s, e, t))
        elif roll < 0.45:
            pred.append((s, e, TYPES[(TYPES.index(t) + 1) % 3]))
        elif roll < 0.7:
            pred.append((s, e + 1, t if rng.random() < 0.5 else TYPES[0]))
    return sorted(set(pred + random_mentions(rng, int(rng.integers(0, 4)))))


class TestSpanIou:
    def test_identical(self):
        assert span_iou((3, 7), (3, 7)) == 1.0

    def test_partial(self):
        assert span_iou((0, 4), (2, 6)) == pytest.approx(1 / 3)

    def test_disjoint(self):
        assert span_iou((0, 2), (2, 4)) == 0.0

    @given(st.tuples(st.integers(0, 30), st.integers(1, 10)),
           st.tuples(st.integers(0, 30), st.integers(1, 10)))
    def test_symmetric_bounded(self, a, b):
        a, b = (a[0], a[0] + a[1]), (b[0], b[0] + b[1])
        assert span_iou(a, b) == span_iou(b, a)
        assert 0.0 <= span_iou(a, b) <= 1.0


class TestNer:
    def test_identical(self):
        gold = [[(0, 2, "PRIMARY"), (3, 4, "SYMBOL")]]
        s = ner_evaluate(gold, gold)
        assert [s.strict.f1, s.exact.f1, s.partial.f1, s.type.f1] == [1.0] * 4

    def test_boundary_off_by_one(self):
        s = ner_evaluate([[(0, 3, "PRIMARY")]], [[(0, 2, "PRIMARY")]])
        assert s.strict.f1 == 0.0
        assert s.type.f1 == 1.0
        assert s.partial.f1 == 0.5

    def test_wrong_type_exact_boundaries(self):
        s = ner_evaluate([[(0, 2, "SYMBOL")]], [[(0, 2, "PRIMARY")]])
        assert (s.strict.f1, s.exact.f1, s.partial.f1, s.type.f1) == (0.0, 1.0, 1.0, 0.0)

    def test_spurious_and_missed(self):
        s = ner_evaluate([[(10, 12, "SYMBOL")]], [[(0, 2, "PRIMARY")]])
        assert s.counts["strict"] == {"spurious": 1, "missed": 1}

    def test_against_reference_scorer(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            gold = [random_mentions(rng, int(rng.integers(0, 8))) for _ in range(10)]
            pred = [perturb(rng, g) for g in gold]
            ours = ner_evaluate(pred, gold)
            ref = reference_ner(pred, gold)
            for mode, (p, r, f) in ref.items():
                got = getattr(ours, mode)
                assert (got.precision, got.recall, got.f1) == pytest.approx((p, r, f))

    def test_mode_ordering_random(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            gold = [random_mentions(rng, int(rng.integers(1, 8))) for _ in range(3)]
            s = ner_evaluate([perturb(rng, g) for g in gold], gold)
            assert s.strict.f1 <= s.exact.f1 + 1e-12
            assert s.strict.f1 <= s.type.f1 + 1e-12
            assert s.strict.f1 <= s.partial.f1 + 1e-12


def _rel_doc(doc_id, rels, domain="math"):
    return EvalDocument(doc_id, [(h, t, typ, 1.0) for h, t, typ in rels], domain=domain)


def random_relations(rng, n):
    out = set()
    for _ in range(n):
        h, t = int(rng.integers(0, 30)), int(rng.integers(0, 30))
        out.add(((h, h + int(rng.integers(1, 6))), (t, t + int(rng.integers(1, 6))),
                 RELS[int(rng.integers(0, 4))]))
    return sorted(out)


def jitter(rng, rels):
    out = []
    for h, t, typ in rels:
        roll = rng.random()
        if roll < 0.4:
            out.append((h, t, typ, float(rng.random())))
        elif roll < 0.8:
            out.append(((h[0], h[1] + int(rng.integers(0, 2))), (t[0], t[1] + int(rng.integers(0, 2))),
                        typ, float(rng.random())))
    out += [(h, t, typ, float(rng.random())) for h, t, typ in random_relations(rng, 2)]
    return out


class TestRelations:
    def test_identical(self):
        gold = [_rel_doc("a", [((0, 2), (3, 4), "Direct")])]
        for match in (MatchSpec(), MatchSpec("iou", 0.67)):
            assert re_evaluate(gold, gold, match).micro.f1 == 1.0

    def test_iou_needs_threshold(self):
        with pytest.raises(ConfigError):
            MatchSpec("iou")
        with pytest.raises(ConfigError):
            MatchSpec("iou", 1.5)

    def test_iou_credits_near_miss(self):
        gold = [_rel_doc("a", [((0, 4), (10, 13), "Direct")])]
        pred = [_rel_doc("a", [((0, 5), (10, 13), "Direct")])]  # head IOU 0.8
        assert re_evaluate(pred, gold).micro.f1 == 0.0
        assert re_evaluate(pred, gold, MatchSpec("iou", 0.67)).micro.f1 == 1.0
        assert re_evaluate(pred, gold, MatchSpec("iou", 0.8)).micro.f1 == 0.0

    def test_iou_one_to_one_by_score(self):
        gold = [EvalDocument("a", [((0, 4), (10, 13), "Direct", 0)])]
        pred = [EvalDocument("a", [((0, 5), (10, 13), "Direct", 0.2),
                                   ((0, 4), (10, 14), "Direct", 0.9)])]
        s = re_evaluate(pred, gold, MatchSpec("iou", 0.67))
        assert s.per_type["Direct"]["tp"] == 1
        assert s.micro.precision == 0.5

    def test_macro_over_present_types(self):
        gold = [_rel_doc("a", [((0, 1), (2, 3), "Direct"), ((4, 5), (6, 7), "Count")])]
        pred = [_rel_doc("a", [((0, 1), (2, 3), "Direct")])]
        s = re_evaluate(pred, gold)
        assert s.macro.f1 == pytest.approx(0.5)
        assert s.micro.f1 == pytest.approx(2 / 3)

    def test_per_domain(self):
        gold = [_rel_doc("a", [((0, 1), (2, 3), "Direct")], "cs"),
                _rel_doc("b", [((0, 1), (2, 3), "Direct")], "econ")]
        pred = [_rel_doc("a", [((0, 1), (2, 3), "Direct")])]
        s = re_evaluate(pred, gold)
        assert s.per_domain["cs"]["micro_f1"] == 1.0
        assert s.per_domain["econ"]["micro_f1"] == 0.0

    def test_partial_at_least_strict_random(self):
        rng = np.random.default_rng(0)
        for i in range(100):
            gold_rel = [random_relations(rng, int(rng.integers(1, 8))) for _ in range(3)]
            gold = [_rel_doc(str(j), g) for j, g in enumerate(gold_rel)]
            pred = [EvalDocument(str(j), jitter(rng, g)) for j, g in enumerate(gold_rel)]
            strict = re_evaluate(pred, gold).micro.f1
            partial = re_evaluate(pred, gold, MatchSpec("iou", 0.67)).micro.f1
            assert partial >= strict


class TestEntityRecall:
    def test_all_spans(self):
        spans = [(0, 1), (1, 2), (2, 3)]
        assert entity_recall_at_k([0.1, 0.5, 0.3], spans, spans, 10) == 1.0

    def test_rank_three(self):
        spans = [(0, 1), (1, 2), (2, 3)]
        scores = [0.9, 0.8, 0.1]
        assert entity_recall_at_k(scores, spans, [(2, 3)], 2) == 0.0
        assert entity_recall_at_k(scores, spans, [(2, 3)], 3) == 1.0

    def test_no_gold(self):
        with pytest.raises(UndefinedRateError):
            entity_recall_at_k([1.0], [(0, 1)], [], 1)

    def test_monotone_in_k(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            spans = [(i, i + w) for i in range(20) for w in (1, 2, 3)]
            scores = rng.normal(size=len(spans))
            gold = [spans[i] for i in rng.choice(len(spans), size=5, replace=False)]
            recalls = [entity_recall_at_k(scores, spans, gold, k) for k in range(1, len(spans) + 1)]
            assert all(a <= b for a, b in zip(recalls, recalls[1:]))
            assert recalls[-1] == 1.0


class TestAggregate:
    def test_arithmetic(self):
        agg = aggregate_runs([{"f1": 1.0}, {"f1": 2.0}, {"f1": 10.0}])
        assert agg["f1"]["median"] == 2.0
        mean = 13 / 3
        assert agg["f1"]["std"] == pytest.approx(math.sqrt(((1 - mean) ** 2 + (2 - mean) ** 2
                                                            + (10 - mean) ** 2) / 3))
        assert agg["f1"]["std"] == pytest.approx(4.028, abs=1e-3)

    def test_identical_runs(self):
        assert aggregate_runs([{"f1": 0.5, "tag": "x"}] * 3) == {"f1": {"median": 0.5, "std": 0.0}}


def test_sweep_csv(tmp_path):
    path = tmp_path / "s.csv"
    write_sweep_csv([SweepRow(10, 50.0, 25.0, 100 / 3, 40.0)], path)
    assert path.read_text().splitlines() == ["k,p,r,f,entity_recall",
                                             "10,50.000000,25.000000,33.333333,40.000000"]
