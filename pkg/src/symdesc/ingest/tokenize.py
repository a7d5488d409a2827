"""Tokenizers that keep a character offset for every token."""

from __future__ import annotations

import re
import zlib
from dataclasses import dataclass, field

import numpy as np


@dataclass
class TokenizedDocument:
    text: str
    tokens: list[str]
    offsets: list[tuple[int, int]]
    ids: list[int]
    # clean-text index -> original-text index
    char_map: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.char_map is None:
            self.char_map = np.arange(len(self.text), dtype=np.int64)

    def __len__(self):
        return len(self.tokens)

    def char_span(self, start: int, end: int) -> tuple[int, int]:
        """Character span (in ``text``) covered by tokens ``[start, end)``."""
        return self.offsets[start][0], self.offsets[end - 1][1]

    def original_span(self, start: int, end: int) -> tuple[int, int]:
        """Character span in the original, pre-LaTeX-stripping text."""
        lo, hi = self.char_span(start, end)
        return int(self.char_map[lo]), int(self.char_map[hi - 1]) + 1


class ToyTokenizer:
    """Regex word-piece tokenizer with hashed vocabulary.

    Words are runs of letters/digits; every other non-space character is its
    own token. Words longer than ``max_piece`` characters are cut into pieces
    of that length, which gives sub-word boundaries like a real word-piece
    vocabulary does.
    """

    kind = "toy"
    _pattern = re.compile(r"[^\W_]+|\S")
    unk_id = 0

    def __init__(self, vocab_size: int = 4096, max_piece: int = 6):
        self.vocab_size = vocab_size
        self.max_piece = max_piece

    def token_id(self, token: str) -> int:
        if not token.isprintable():
            return self.unk_id
        return 1 + zlib.crc32(token.encode("utf-8")) % (self.vocab_size - 1)

    def tokenize(self, text: str) -> TokenizedDocument:
        tokens, offsets = [], []
        for m in self._pattern.finditer(text):
            start, word = m.start(), m.group(0)
            for k in range(0, len(word), self.max_piece):
                piece = word[k:k + self.max_piece]
                tokens.append(piece)
                offsets.append((start + k, start + k + len(piece)))
        return TokenizedDocument(text, tokens, offsets, [self.token_id(t) for t in tokens])

    def spec(self) -> dict:
        return {"kind": self.kind, "vocab_size": self.vocab_size, "max_piece": self.max_piece}


class HFTokenizer:
    """Wraps a Hugging Face fast tokenizer (e.g. SciBERT's) with offset mapping."""

    kind = "pretrained"

    def __init__(self, name_or_tokenizer):
        if isinstance(name_or_tokenizer, str):
            from transformers import AutoTokenizer

            self.name = name_or_tokenizer
            self.hf = AutoTokenizer.from_pretrained(name_or_tokenizer, use_fast=True)
        else:
            self.hf = name_or_tokenizer
            self.name = getattr(name_or_tokenizer, "name_or_path", "custom")

    def tokenize(self, text: str) -> TokenizedDocument:
        enc = self.hf(text, add_special_tokens=False, return_offsets_mapping=True)
        tokens, offsets, ids = [], [], []
        for tid, (lo, hi) in zip(enc["input_ids"], enc["offset_mapping"]):
            if hi <= lo:
                continue
            tokens.append(self.hf.convert_ids_to_tokens(tid))
            offsets.append((lo, hi))
            ids.append(tid)
        return TokenizedDocument(text, tokens, offsets, ids)

    def spec(self) -> dict:
        return {"kind": self.kind, "name": self.name}


def tokenizer_from_spec(spec: dict):
    if spec.get("kind", "toy") == "toy":
        return ToyTokenizer(spec.get("vocab_size", 4096), spec.get("max_piece", 6))
    return HFTokenizer(spec["name"])


def tokenize_with_offsets(text: str, tokenizer=None) -> TokenizedDocument:
    return (tokenizer or ToyTokenizer()).tokenize(text)
