"""Token encoders: a small deterministic toy model and a pretrained adapter.

Both produce one contextual vector per input token. ``encode`` handles a
single window; ``encode_long_document`` tiles longer inputs with overlapping
windows and keeps, for each token, the vector from the window in which that
token sits closest to the centre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import nn

from .errors import ConfigError, EncoderOverflowError


@dataclass
class EncoderConfig:
    kind: str = "toy"
    hidden_size: int = 32
    window: int = 128
    stride: int = 64
    vocab_size: int = 4096
    model_name: str = "allenai/scibert_scivocab_uncased"

    def __post_init__(self):
        if self.kind not in ("toy", "pretrained"):
            raise ConfigError(f"unknown encoder kind {self.kind!r}")
        if not 0 < self.stride <= self.window:
            raise ConfigError(f"need 0 < stride <= window, got {self.stride}, {self.window}")
        if self.hidden_size <= 0:
            raise ConfigError("hidden_size must be positive")


def window_starts(length: int, window: int, stride: int) -> list[int]:
    starts = [0]
    while starts[-1] + window < length:
        starts.append(starts[-1] + stride)
    return starts


def central_window_assignment(length: int, window: int, stride: int) -> list[tuple[int, int, int]]:
    """For each window, the slice of tokens it is responsible for.

    Returns ``(window_start, lo, hi)`` triples; tokens ``lo..hi-1`` take
    their vector from the window beginning at ``window_start``. Ties in
    centrality go to the earlier window.
    """
    starts = window_starts(length, window, stride)
    owner = []
    for i in range(length):
        best, best_dist = None, math.inf
        for s in starts:
            e = min(s + window, length)
            if s <= i < e:
                dist = abs(i - (s + e - 1) / 2)
                if dist < best_dist:
                    best, best_dist = s, dist
        owner.append(best)
    out = []
    for s in starts:
        idx = [i for i, o in enumerate(owner) if o == s]
        if idx:
            out.append((s, idx[0], idx[-1] + 1))
    return out


class Encoder(nn.Module):
    hidden_size: int
    window: int
    stride: int

    def encode(self, ids) -> torch.Tensor:
        ids = list(ids)
        if len(ids) > self.window:
            raise EncoderOverflowError(
                f"{len(ids)} tokens exceed the encoder window of {self.window}; "
                "use encode_long_document"
            )
        if not ids:
            return self._empty()
        return self._forward(ids)

    def encode_long_document(self, ids) -> torch.Tensor:
        ids = list(ids)
        if len(ids) <= self.window:
            return self.encode(ids)
        pieces = []
        for s, lo, hi in central_window_assignment(len(ids), self.window, self.stride):
            out = self._forward(ids[s:s + self.window])
            pieces.append(out[lo - s:hi - s])
        return torch.cat(pieces, dim=0)

    def _empty(self):
        p = next(self.parameters())
        return torch.zeros(0, self.hidden_size, dtype=p.dtype, device=p.device)

    def _forward(self, ids) -> torch.Tensor:
        raise NotImplementedError


class ToyEncoder(Encoder):
    """Hashed token embeddings plus positions, mixed by one attention layer."""

    def __init__(self, hidden_size=32, window=128, stride=64, vocab_size=4096, seed=0):
        super().__init__()
        self.hidden_size, self.window, self.stride = hidden_size, window, stride
        gen = torch.Generator().manual_seed(seed)
        self.token_embedding = nn.Embedding(vocab_size, hidden_size)
        self.position_embedding = nn.Embedding(window, hidden_size)
        self.query = nn.Linear(hidden_size, hidden_size, bias=False)
        self.key = nn.Linear(hidden_size, hidden_size, bias=False)
        self.value = nn.Linear(hidden_size, hidden_size, bias=False)
        with torch.no_grad():
            self.token_embedding.weight.copy_(torch.randn(vocab_size, hidden_size, generator=gen))
            self.position_embedding.weight.copy_(
                0.5 * torch.randn(window, hidden_size, generator=gen))
            for lin in (self.query, self.key, self.value):
                bound = 1 / math.sqrt(hidden_size)
                lin.weight.copy_(
                    torch.rand(hidden_size, hidden_size, generator=gen) * 2 * bound - bound)

    def _forward(self, ids):
        device = self.token_embedding.weight.device
        idx = torch.as_tensor(ids, dtype=torch.long, device=device)
        pos = torch.arange(len(ids), device=device)
        x = self.token_embedding(idx) + self.position_embedding(pos)
        attn = self.query(x) @ self.key(x).T / math.sqrt(self.hidden_size)
        return x + torch.softmax(attn, dim=-1) @ self.value(x)


class PretrainedEncoder(Encoder):
    """Adapter around a Hugging Face encoder such as SciBERT.

    ``window`` counts content tokens; two positions are reserved for the
    model's [CLS]/[SEP] markers.
    """

    def __init__(self, model, window=512, stride=256, cls_id=None, sep_id=None):
        super().__init__()
        self.model = model
        cfg = model.config
        self.hidden_size = cfg.hidden_size
        self.window = min(window, cfg.max_position_embeddings) - 2
        self.stride = min(stride, self.window)
        self.cls_id = cls_id if cls_id is not None else getattr(cfg, "cls_token_id", None)
        self.sep_id = sep_id if sep_id is not None else getattr(cfg, "sep_token_id", None)
        if self.cls_id is None or self.sep_id is None:
            raise ConfigError("pretrained encoder needs [CLS] and [SEP] token ids")

    @classmethod
    def from_name(cls, name, window=512, stride=256):
        from transformers import AutoModel, AutoTokenizer

        tok = AutoTokenizer.from_pretrained(name)
        return cls(AutoModel.from_pretrained(name), window, stride,
                   tok.cls_token_id, tok.sep_token_id)

    def _forward(self, ids):
        device = next(self.model.parameters()).device
        input_ids = torch.tensor([[self.cls_id, *ids, self.sep_id]], device=device)
        out = self.model(input_ids=input_ids, attention_mask=torch.ones_like(input_ids))
        return out.last_hidden_state[0, 1:-1]


def build_encoder(config: EncoderConfig, seed: int = 0) -> Encoder:
    if config.kind == "toy":
        return ToyEncoder(config.hidden_size, config.window, config.stride,
                          config.vocab_size, seed)
    return PretrainedEncoder.from_name(config.model_name, config.window, config.stride)
