"""Prediction from raw text to typed mentions and relations in character offsets,
and the prediction JSON format consumed by the evaluator."""

from __future__ import annotations

import json
import os
from pathlib import Path

from ..errors import CorpusFormatError
from ..evaluation import EvalDocument, relation_mentions
from ..ingest import RawDocument, char_to_token_span, latex_to_text, project_span
from ..ingest.latex import identity_map
from ..ingest.tokenize import tokenizer_from_spec
from .model import ExtractionModel


def predict_document(model: ExtractionModel, text: str, k: int, doc_id: str = "doc",
                     domain: str = "unknown") -> dict:
    """Run the full pipeline on one document.

    Returns a record in the corpus layout (entities with ids and character
    offsets into ``text``; relations by entity id) plus a ``score`` on each
    relation.
    """
    record = {"id": doc_id, "domain": domain, "entities": [], "relations": []}
    if not text:
        return record
    adoc = model.prepare(RawDocument(id=doc_id, text=text, domain=domain))
    out = model.extract(adoc, k)
    ids = {}
    for i, mention in enumerate(out.typing.mentions, start=1):
        start, end = adoc.tok.original_span(*mention.span)
        ids[mention.span] = f"T{i}"
        record["entities"].append({"id": f"T{i}", "type": mention.type,
                                   "start": start, "end": end})
    for p in sorted(out.relations, key=lambda p: (-p.score, p.head, p.tail)):
        record["relations"].append({"type": p.type, "head": ids[p.head], "tail": ids[p.tail],
                                    "score": p.score})
    return record


def predict_corpus(model: ExtractionModel, docs, k: int) -> dict:
    return {
        "tokenizer": model.tokenizer.spec(),
        "preprocess": model.config.preprocess,
        "k": k,
        "documents": [predict_document(model, d.text, k, d.id, d.domain) for d in docs],
    }


def write_predictions(payload: dict, path):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(payload, indent=1, ensure_ascii=False))
    os.replace(tmp, path)


def read_predictions(path) -> dict:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(payload, dict) or "documents" not in payload:
        raise CorpusFormatError(f"{path}: missing 'documents'")
    return payload


def _relation_tuples(record):
    spans = {e["id"]: ((e["start"], e["end"]), e["type"]) for e in record.get("entities", [])}
    rels = []
    for r in record.get("relations", []):
        if r["head"] not in spans or r["tail"] not in spans:
            raise CorpusFormatError(f"document {record.get('id')!r}: relation endpoint missing")
        rels.append((spans[r["head"]][0], spans[r["tail"]][0], r["type"], r.get("score", 0.0)))
    return rels, {span: typ for span, typ in spans.values()}


def token_projector(text: str, tokenizer, preprocess: str = "none"):
    """Map original-text character spans to covering token spans.

    Spans that vanish under preprocessing map to the empty span ``(0, 0)``.
    """
    if preprocess == "latex2text":
        clean, char_map = latex_to_text(text)
    else:
        clean, char_map = text, identity_map(text)
    tok = tokenizer.tokenize(clean)
    tok.char_map = char_map

    def project(span):
        moved = project_span(char_map, *span)
        if moved is None:
            return (0, 0)
        try:
            return char_to_token_span(tok, *moved)[0]
        except Exception:
            return (0, 0)

    return project


def eval_documents(pred_payload: dict, gold_docs):
    """Build character-level :class:`EvalDocument` pairs plus NER mention lists."""
    tokenizer = tokenizer_from_spec(pred_payload.get("tokenizer", {"kind": "toy"}))
    preprocess = pred_payload.get("preprocess", "none")
    pred_docs, gold_eval, ner_pred, ner_gold = [], [], [], []
    by_id = {r["id"]: r for r in pred_payload["documents"]}
    for gold in gold_docs:
        rels, types = _relation_tuples(by_id.get(gold.id, {"id": gold.id}))
        pred_docs.append(EvalDocument(gold.id, rels))
        ner_pred.append(relation_mentions(rels, types.get))
        grels, gtypes = _relation_tuples(gold.to_record())
        gold_eval.append(EvalDocument(gold.id, grels, domain=gold.domain,
                                      project=token_projector(gold.text, tokenizer, preprocess)))
        ner_gold.append(relation_mentions(grels, gtypes.get))
    return pred_docs, gold_eval, ner_pred, ner_gold
