"""The joint extraction model: encoder, span prototypes and relation prototypes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from ..encoder import build_encoder
from ..entity_typing import TypingResult, assign_entity_types
from ..ingest import AlignedDocument, RawDocument, prepare_document
from ..ingest.tokenize import ToyTokenizer, tokenizer_from_spec
from ..labels import ENTITY_INDEX, RELATION_INDEX
from ..mention import (
    EntityPrototypeBank,
    downsample_training_candidates,
    enumerate_spans,
    mention_loss,
    pool_spans,
    score_spans,
    select_top_k,
)
from ..relation import (
    NUM_RELATIONS,
    RelationPrototypeBank,
    adaptive_thresholding_loss,
    candidate_pair_logits,
    deduplicate_predictions,
    predict_relations,
)
from .config import TrainConfig


@dataclass
class DocumentPrediction:
    relations: list
    typing: TypingResult
    candidates: list


def pair_index(head: int, tail: int, count: int) -> int:
    """Position of ordered pair (head, tail) in :func:`relation.ordered_pairs` order."""
    return head * (count - 1) + (tail if tail < head else tail - 1)


class ExtractionModel(nn.Module):
    def __init__(self, config: TrainConfig, encoder=None, tokenizer=None):
        super().__init__()
        self.config = config
        torch.manual_seed(config.seed)
        self.encoder = encoder if encoder is not None else build_encoder(
            config.encoder_config(), seed=config.seed)
        if tokenizer is None:
            if config.encoder_kind == "toy":
                tokenizer = ToyTokenizer(config.vocab_size, config.max_piece)
            else:
                tokenizer = tokenizer_from_spec({"kind": "pretrained", "name": config.model_name})
        self.tokenizer = tokenizer
        d = self.encoder.hidden_size
        gen = torch.Generator().manual_seed(config.seed + 1)
        self.entity_bank = EntityPrototypeBank(d, generator=gen)
        self.relation_bank = RelationPrototypeBank(d, config.num_nota, generator=gen)

    # ------------------------------------------------------------------ input

    def prepare(self, doc: RawDocument) -> AlignedDocument:
        return prepare_document(doc, self.tokenizer, self.config.preprocess)

    def _span_embeddings(self, adoc: AlignedDocument, spans):
        emb = self.encoder.encode_long_document(adoc.tok.ids)
        return pool_spans(emb, spans, self.config.pooling)

    # -------------------------------------------------------------- inference

    @torch.no_grad()
    def score_candidates(self, adoc: AlignedDocument):
        """All enumerated spans with their scores and pooled embeddings."""
        spans = enumerate_spans(len(adoc.tok), self.config.max_span_length)
        if not spans:
            return spans, torch.zeros(0), torch.zeros(0, self.encoder.hidden_size)
        E = self._span_embeddings(adoc, spans)
        return spans, score_spans(E, self.entity_bank.prototypes), E

    @torch.no_grad()
    def relations_for_candidates(self, E, spans, indices):
        if len(indices) < 2:
            return []
        logits, heads, tails = candidate_pair_logits(E[indices], self.relation_bank)
        chosen = [spans[i] for i in indices]
        preds = predict_relations(logits, [chosen[h] for h in heads], [chosen[t] for t in tails])
        return deduplicate_predictions(preds)

    @torch.no_grad()
    def extract(self, adoc: AlignedDocument, k: int) -> DocumentPrediction:
        spans, scores, E = self.score_candidates(adoc)
        if not spans:
            return DocumentPrediction([], TypingResult(), [])
        idx = select_top_k(scores, spans, k)
        preds = self.relations_for_candidates(E, spans, idx)
        return DocumentPrediction(preds, assign_entity_types(preds), [spans[i] for i in idx])

    # --------------------------------------------------------------- training

    def training_loss(self, adoc: AlignedDocument, rng: np.random.Generator):
        """``(total, mention_loss, relation_loss)`` for one document, or ``None``
        when the document has fewer than two tokens."""
        cfg = self.config
        n_tok = len(adoc.tok)
        if n_tok < 2:
            return None
        gold = {span: ENTITY_INDEX[typ] for span, typ in adoc.gold_mentions
                if span[1] - span[0] <= cfg.max_span_length}
        spans = enumerate_spans(n_tok, cfg.max_span_length)
        spans = downsample_training_candidates(spans, gold, cfg.downsample, rng)
        E = self._span_embeddings(adoc, spans)
        scores = score_spans(E, self.entity_bank.prototypes)
        chosen = select_top_k(scores, spans, cfg.k_train, gold_spans=gold)

        true_idx = [i for i in chosen if spans[i] in gold]
        false_idx = [i for i in chosen if spans[i] not in gold]
        labels = torch.tensor([gold[spans[i]] for i in true_idx], dtype=torch.long)
        l_m = mention_loss(E[true_idx], labels, E[false_idx], self.entity_bank.prototypes,
                           cfg.margin, cfg.mention_negative)

        count = len(chosen)
        position = {spans[i]: p for p, i in enumerate(chosen)}
        logits, _, _ = candidate_pair_logits(E[chosen], self.relation_bank)
        targets = torch.zeros(len(logits), NUM_RELATIONS, dtype=torch.bool)
        for head, tail, typ in adoc.gold_relations:
            if head in position and tail in position:
                targets[pair_index(position[head], position[tail], count),
                        RELATION_INDEX[typ]] = True
        l_re = adaptive_thresholding_loss(logits, targets)
        return cfg.w_mention * l_m + cfg.w_relation * l_re, l_m, l_re
