from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from ..encoder import EncoderConfig
from ..errors import ConfigError
from ..mention import MentionConfig

PUBLISHED_LEARNING_RATES = (3e-5, 5e-5, 7e-5)


@dataclass
class TrainConfig:
    learning_rate: float = 5e-5
    epochs: int = 60
    warmup_epochs: int = 1
    batch_size: int = 4
    max_grad_norm: float = 1.0
    weight_decay: float = 0.01
    downsample: int = 1000
    k_train: int = 50
    k_eval_dev: int = 50
    k_eval_test: int = 400
    max_span_length: int = 16
    pooling: str = "max"
    preprocess: str = "none"
    margin: float = 1.0
    mention_negative: str = "label"
    num_nota: int = 4
    w_mention: float = 1.0
    w_relation: float = 1.0
    patience: int = 10
    seed: int = 0
    encoder_kind: str = "toy"
    hidden_size: int = 32
    window: int = 128
    stride: int = 64
    vocab_size: int = 4096
    max_piece: int = 6
    model_name: str = "allenai/scibert_scivocab_uncased"

    def __post_init__(self):
        positive = ("learning_rate", "epochs", "batch_size", "max_grad_norm", "downsample",
                    "k_train", "k_eval_dev", "k_eval_test", "max_span_length", "margin",
                    "num_nota", "patience", "hidden_size", "window", "stride", "vocab_size",
                    "max_piece")
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("warmup_epochs", "weight_decay", "w_mention", "w_relation"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.k_train > self.k_eval_test:
            raise ConfigError("k_train must not exceed k_eval_test")
        if self.preprocess not in ("none", "latex2text"):
            raise ConfigError(f"preprocess must be 'none' or 'latex2text', got {self.preprocess!r}")
        self.encoder_config()
        self.mention_config()

    def encoder_config(self) -> EncoderConfig:
        return EncoderConfig(self.encoder_kind, self.hidden_size, self.window, self.stride,
                             self.vocab_size, self.model_name)

    def mention_config(self) -> MentionConfig:
        return MentionConfig(self.max_span_length, self.pooling, self.k_train, self.downsample,
                             self.margin, self.mention_negative)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "TrainConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a flat JSON object")
        return cls.from_dict(data)

    @classmethod
    def published(cls, **overrides) -> "TrainConfig":
        """Published recipe with a SciBERT-class encoder."""
        base = dict(encoder_kind="pretrained", hidden_size=768, window=512, stride=256,
                    learning_rate=5e-5)
        base.update(overrides)
        return cls(**base)
