"""Span enumeration, pooling, prototype scoring, top-k selection and mention loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .errors import ConfigError, DimensionError
from .labels import ENTITY_TYPES

TokenSpan = tuple[int, int]


NEGATIVE_MODES = ("label", "score")


@dataclass
class MentionConfig:
    max_span_length: int = 16
    pooling: str = "max"
    k: int = 50
    downsample: int = 1000
    margin: float = 1.0
    negative: str = "label"

    def __post_init__(self):
        if self.negative not in NEGATIVE_MODES:
            raise ConfigError(f"negative must be one of {NEGATIVE_MODES}, got {self.negative!r}")
        if self.max_span_length < 1:
            raise ConfigError("max_span_length must be >= 1")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.pooling not in ("mean", "max"):
            raise ConfigError(f"pooling must be 'mean' or 'max', got {self.pooling!r}")


class EntityPrototypeBank(nn.Module):
    """One trainable prototype vector per entity type."""

    def __init__(self, hidden_size: int, num_types: int = len(ENTITY_TYPES), std: float = 0.02,
                 generator: torch.Generator | None = None):
        super().__init__()
        self.prototypes = nn.Parameter(torch.randn(num_types, hidden_size, generator=generator) * std)

    def forward(self, span_embeddings):
        return score_spans(span_embeddings, self.prototypes)


def enumerate_spans(length: int, max_len: int) -> list[TokenSpan]:
    """All spans of 1..max_len tokens, ordered by start then length."""
    return [
        (start, start + width)
        for start in range(length)
        for width in range(1, min(max_len, length - start) + 1)
    ]


def span_count(length: int, max_len: int) -> int:
    return sum(length - w + 1 for w in range(1, min(max_len, length) + 1))


def pool_span(emb: torch.Tensor, span: TokenSpan, pooling: str = "max") -> torch.Tensor:
    rows = emb[span[0]:span[1]]
    if pooling == "mean":
        return rows.mean(dim=0)
    if pooling == "max":
        return rows.max(dim=0).values
    raise ConfigError(f"unknown pooling {pooling!r}")


def pool_spans(emb: torch.Tensor, spans: list[TokenSpan], pooling: str = "max") -> torch.Tensor:
    """Pool many spans at once; equivalent to stacking :func:`pool_span` results."""
    if not spans:
        return emb.new_zeros(0, emb.shape[1])
    arr = np.asarray(spans)
    starts = torch.as_tensor(arr[:, 0], device=emb.device)
    widths = torch.as_tensor(arr[:, 1] - arr[:, 0], device=emb.device)
    max_w = int(widths.max())
    if pooling == "mean":
        csum = torch.cat([emb.new_zeros(1, emb.shape[1]), emb.cumsum(dim=0)])
        ends = starts + widths
        return (csum[ends] - csum[starts]) / widths.unsqueeze(1).to(emb.dtype)
    if pooling != "max":
        raise ConfigError(f"unknown pooling {pooling!r}")
    # running[w - 1][i] = max of emb[i : i + w]
    out = emb.new_empty(len(spans), emb.shape[1])
    running = emb
    for w in range(1, max_w + 1):
        if w > 1:
            running = torch.maximum(running[:-1], emb[w - 1:])
        sel = (widths == w).nonzero(as_tuple=True)[0]
        if len(sel):
            out = out.index_put((sel,), running[starts[sel]])
    return out


def score_spans(span_embeddings: torch.Tensor, prototypes: torch.Tensor) -> torch.Tensor:
    """Span score: the best dot product against any entity-type prototype."""
    if span_embeddings.shape[-1] != prototypes.shape[-1]:
        raise DimensionError(
            f"span embeddings have dimension {span_embeddings.shape[-1]}, "
            f"prototypes {prototypes.shape[-1]}"
        )
    if span_embeddings.shape[0] == 0:
        return span_embeddings.new_zeros(0)
    return (span_embeddings @ prototypes.T).max(dim=-1).values


def rank_spans(scores, spans: list[TokenSpan]) -> np.ndarray:
    """Indices ordered by score descending, then start ascending, then length ascending."""
    if len(spans) == 0:
        return np.zeros(0, dtype=np.int64)
    s = scores.detach().cpu().numpy() if isinstance(scores, torch.Tensor) else np.asarray(scores)
    arr = np.asarray(spans)
    # lexsort sorts by the last key first
    return np.lexsort((arr[:, 1] - arr[:, 0], arr[:, 0], -s))


def select_top_k(scores, spans: list[TokenSpan], k: int,
                 gold_spans=None) -> list[int]:
    """Indices (into ``spans``) of the candidate mention set.

    At inference this is the ``k`` best-scored spans. When ``gold_spans`` is
    given (training), every gold span present in ``spans`` is added as well.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    order = rank_spans(scores, spans)
    chosen = [int(i) for i in order[:k]]
    if gold_spans is not None:
        gold_spans = set(gold_spans)
        present = set(chosen)
        for i, span in enumerate(spans):
            if span in gold_spans and i not in present:
                chosen.append(i)
                present.add(i)
    return chosen


def downsample_training_candidates(spans: list[TokenSpan], gold_spans, limit: int,
                                   rng: np.random.Generator) -> list[TokenSpan]:
    """Keep all gold spans and a uniform random sample of the rest, ``limit`` in total.

    The original span order is preserved.
    """
    gold_spans = set(gold_spans)
    gold_idx = [i for i, s in enumerate(spans) if s in gold_spans]
    if limit < len(gold_idx):
        raise ConfigError(f"downsample size {limit} smaller than {len(gold_idx)} gold spans")
    if len(spans) <= limit:
        return list(spans)
    gold_set = set(gold_idx)
    rest = np.array([i for i in range(len(spans)) if i not in gold_set], dtype=np.int64)
    picked = rng.choice(rest, size=limit - len(gold_idx), replace=False)
    keep = np.sort(np.concatenate([np.asarray(gold_idx, dtype=np.int64), picked]))
    return [spans[i] for i in keep]


def mention_loss(true_embeddings: torch.Tensor, true_labels: torch.Tensor,
                 false_embeddings: torch.Tensor, prototypes: torch.Tensor,
                 margin: float = 1.0, negative: str = "label") -> torch.Tensor:
    """Mean triplet hinge over every (known-true, other) span pair.

    The anchor is the prototype of the true span's entity type; the triplet
    is measured in dot-product similarity, so each term is
    ``max(0, margin - <p, e_true> + <p, e_false>)``. Returns zero when either
    side is empty.

    With ``negative="score"`` the false span enters through its ranking
    score (best similarity to any prototype) instead of its similarity to
    ``p``, so a zero loss guarantees every true span outranks every false one.
    """
    if len(true_embeddings) == 0 or len(false_embeddings) == 0:
        return prototypes.sum() * 0.0
    anchors = prototypes[true_labels]
    pos = (anchors * true_embeddings).sum(dim=-1)
    if negative == "score":
        neg = score_spans(false_embeddings, prototypes).unsqueeze(0)
    elif negative == "label":
        neg = anchors @ false_embeddings.T
    else:
        raise ConfigError(f"unknown negative mode {negative!r}")
    return torch.relu(margin - pos.unsqueeze(1) + neg).mean()
