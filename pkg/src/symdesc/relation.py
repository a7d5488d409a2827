"""Pairwise relation classification against relation and none-of-the-above prototypes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .errors import DimensionError
from .labels import RELATION_TYPES

TokenSpan = tuple[int, int]
NUM_RELATIONS = len(RELATION_TYPES)


@dataclass(frozen=True)
class RelationPrediction:
    head: TokenSpan
    tail: TokenSpan
    type: str
    score: float


class RelationPrototypeBank(nn.Module):
    """One prototype per relation type plus ``m`` none-of-the-above prototypes.

    All vectors live in the space of concatenated (head, tail) span embeddings.
    """

    def __init__(self, hidden_size: int, num_nota: int = 4, std: float = 0.02,
                 generator: torch.Generator | None = None):
        super().__init__()
        if num_nota < 1:
            raise ValueError("need at least one none-of-the-above prototype")
        self.relation = nn.Parameter(torch.randn(NUM_RELATIONS, 2 * hidden_size,
                                                 generator=generator) * std)
        self.nota = nn.Parameter(torch.randn(num_nota, 2 * hidden_size,
                                             generator=generator) * std)

    @property
    def all_prototypes(self) -> torch.Tensor:
        return torch.cat([self.relation, self.nota], dim=0)


def ordered_pairs(count: int) -> tuple[np.ndarray, np.ndarray]:
    """Head and tail indices of all ``count * (count - 1)`` ordered pairs."""
    heads, tails = np.meshgrid(np.arange(count), np.arange(count), indexing="ij")
    keep = heads != tails
    return heads[keep], tails[keep]


def build_pair_representations(span_embeddings: torch.Tensor):
    """Concatenate head and tail embeddings for every ordered pair without self-pairs.

    Returns ``(representations, heads, tails)``.
    """
    heads, tails = ordered_pairs(len(span_embeddings))
    h = torch.as_tensor(heads, device=span_embeddings.device)
    t = torch.as_tensor(tails, device=span_embeddings.device)
    reps = torch.cat([span_embeddings[h], span_embeddings[t]], dim=-1)
    return reps, heads, tails


def pair_logits(representations: torch.Tensor, bank: RelationPrototypeBank) -> torch.Tensor:
    """Dot products of pair representations with every prototype.

    Columns are the relation types in :data:`RELATION_TYPES` order followed by
    the none-of-the-above prototypes.
    """
    protos = bank.all_prototypes
    if representations.shape[-1] != protos.shape[-1]:
        raise DimensionError(
            f"pair representation has dimension {representations.shape[-1]}, "
            f"prototypes {protos.shape[-1]}"
        )
    return representations @ protos.T


def candidate_pair_logits(span_embeddings: torch.Tensor, bank: RelationPrototypeBank):
    """Same result as ``pair_logits(build_pair_representations(E))`` without
    materialising the ``K(K-1) x 2d`` representation matrix.

    Returns ``(logits, heads, tails)``.
    """
    protos = bank.all_prototypes
    d = span_embeddings.shape[-1]
    if protos.shape[-1] != 2 * d:
        raise DimensionError(f"prototypes have dimension {protos.shape[-1]}, expected {2 * d}")
    head_part = span_embeddings @ protos[:, :d].T
    tail_part = span_embeddings @ protos[:, d:].T
    heads, tails = ordered_pairs(len(span_embeddings))
    h = torch.as_tensor(heads, device=span_embeddings.device)
    t = torch.as_tensor(tails, device=span_embeddings.device)
    return head_part[h] + tail_part[t], heads, tails


def threshold_logit(logits: torch.Tensor) -> torch.Tensor:
    """Per-pair threshold: the largest none-of-the-above logit."""
    return logits[..., NUM_RELATIONS:].max(dim=-1).values


def predict_relations(logits: torch.Tensor, head_spans, tail_spans) -> list[RelationPrediction]:
    """Emit a prediction wherever a relation prototype beats every NOTA prototype.

    Ties go to NOTA. The score is the winning relation logit minus the
    threshold logit, so it is always positive.
    """
    if len(logits) == 0:
        return []
    logits = logits.detach()
    th = threshold_logit(logits)
    best, best_idx = logits[:, :NUM_RELATIONS].max(dim=-1)
    margin = (best - th).cpu().numpy()
    best_idx = best_idx.cpu().numpy()
    return [
        RelationPrediction(tuple(head_spans[i]), tuple(tail_spans[i]),
                           RELATION_TYPES[best_idx[i]], float(margin[i]))
        for i in np.nonzero(margin > 0)[0]
    ]


def adaptive_thresholding_loss(logits: torch.Tensor, labels: torch.Tensor,
                               reduction: str = "mean") -> torch.Tensor:
    """Adaptive thresholding loss with the max-NOTA logit as threshold class.

    ``labels`` is a boolean ``(P, 4)`` matrix of gold relation types per pair.
    For each pair the loss is

        -sum_{r in pos} log softmax_{pos + TH}(l)_r  -  log softmax_{neg + TH}(l)_TH

    which pushes gold relation logits above the threshold and the threshold
    above all other relation logits.
    """
    labels = labels.to(torch.bool)
    rel = logits[..., :NUM_RELATIONS]
    th = threshold_logit(logits).unsqueeze(-1)
    neg_inf = torch.finfo(logits.dtype).min

    pos_logits = torch.where(labels, rel, torch.full_like(rel, neg_inf))
    pos_norm = torch.logsumexp(torch.cat([pos_logits, th], dim=-1), dim=-1, keepdim=True)
    loss1 = -((rel - pos_norm) * labels).sum(dim=-1)

    neg_logits = torch.where(labels, torch.full_like(rel, neg_inf), rel)
    neg_norm = torch.logsumexp(torch.cat([neg_logits, th], dim=-1), dim=-1)
    loss2 = neg_norm - th.squeeze(-1)

    loss = loss1 + loss2
    if reduction == "none":
        return loss
    if reduction == "sum":
        return loss.sum()
    return loss.mean() if loss.numel() else logits.sum() * 0.0


def spans_overlap(a: TokenSpan, b: TokenSpan) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def deduplicate_predictions(preds: list[RelationPrediction]) -> list[RelationPrediction]:
    """Suppress same-type predictions whose head and tail both overlap a better one.

    Predictions are visited from highest score down (ties by head, tail);
    a prediction survives unless a surviving prediction of the same type
    overlaps it on both endpoints.
    """
    order = sorted(preds, key=lambda p: (-p.score, p.head, p.tail, p.type))
    kept: list[RelationPrediction] = []
    for p in order:
        if any(q.type == p.type and spans_overlap(q.head, p.head) and spans_overlap(q.tail, p.tail)
               for q in kept):
            continue
        kept.append(p)
    return kept
