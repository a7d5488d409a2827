from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import torch

from ..errors import CorpusFormatError
from .config import TrainConfig
from .model import ExtractionModel

FORMAT = "symdesc-checkpoint"
VERSION = 1


@dataclass
class Checkpoint:
    model: ExtractionModel
    best_dev_f1: float = 0.0
    epoch: int = -1
    history: list = field(default_factory=list)

    @property
    def config(self) -> TrainConfig:
        return self.model.config


def save_checkpoint(ckpt: Checkpoint, path) -> Path:
    """Write atomically: a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format": FORMAT,
        "version": VERSION,
        "config": ckpt.config.to_dict(),
        "tokenizer": ckpt.model.tokenizer.spec(),
        "state_dict": ckpt.model.state_dict(),
        "best_dev_f1": ckpt.best_dev_f1,
        "epoch": ckpt.epoch,
        "history": ckpt.history,
    }
    tmp = path.with_name(path.name + ".tmp")
    torch.save(payload, tmp)
    os.replace(tmp, path)
    return path


def load_checkpoint(path) -> Checkpoint:
    payload = torch.load(Path(path), map_location="cpu", weights_only=False)
    if not isinstance(payload, dict) or payload.get("format") != FORMAT:
        raise CorpusFormatError(f"{path}: not a {FORMAT} file")
    config = TrainConfig.from_dict(payload["config"])
    model = ExtractionModel(config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return Checkpoint(model, payload["best_dev_f1"], payload["epoch"], payload.get("history", []))
