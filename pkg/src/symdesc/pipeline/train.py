"""Training loop: AdamW, warmup + linear decay, clipping, early stopping on dev RE F1."""

from __future__ import annotations

import copy
import json
import logging
import math
import time

import numpy as np
import torch

from ..errors import DivergenceError
from ..evaluation import EvalDocument, ner_evaluate, re_evaluate, relation_mentions
from .checkpoint import Checkpoint, save_checkpoint
from .config import TrainConfig
from .model import ExtractionModel

log = logging.getLogger(__name__)


def lr_factor(step: int, warmup_steps: int, total_steps: int) -> float:
    """Multiplier on the peak learning rate for the ``step``-th optimizer step (0-based).

    Rises linearly to 1 over the warmup steps (the first step already gets
    ``1 / warmup_steps``), then falls linearly to 0 at ``total_steps``.
    """
    if step < warmup_steps:
        return (step + 1) / warmup_steps
    if total_steps <= warmup_steps:
        return 0.0
    return max(0.0, (total_steps - step) / (total_steps - warmup_steps))


def evaluate_aligned(model: ExtractionModel, aligned, k: int) -> dict:
    """Token-level strict relation and NER scores on aligned documents."""
    model.eval()
    pred_docs, gold_docs, ner_pred, ner_gold = [], [], [], []
    for adoc in aligned:
        out = model.extract(adoc, k)
        pred_docs.append(EvalDocument(adoc.doc.id, [(p.head, p.tail, p.type, p.score)
                                                    for p in out.relations]))
        gold_rel = adoc.gold_relations
        gold_docs.append(EvalDocument(adoc.doc.id, gold_rel, domain=adoc.doc.domain))
        ner_pred.append([(m.span[0], m.span[1], m.type) for m in out.typing.mentions])
        gold_types = dict(adoc.gold_mentions)
        ner_gold.append(relation_mentions(gold_rel, gold_types.get))
    re_scores = re_evaluate(pred_docs, gold_docs)
    ner = ner_evaluate(ner_pred, ner_gold)
    metrics = {
        "re_precision": re_scores.micro.precision,
        "re_recall": re_scores.micro.recall,
        "re_f1": re_scores.micro.f1,
        "re_macro_f1": re_scores.macro.f1,
    }
    for mode in ("strict", "exact", "partial", "type"):
        metrics[f"ner_{mode}_f1"] = getattr(ner, mode).f1
    return metrics


def _check_finite(value, what, epoch, step, parts):
    if not math.isfinite(value):
        detail = ", ".join(f"{k}={v:.4g}" for k, v in parts.items())
        raise DivergenceError(f"non-finite {what} at epoch {epoch} step {step} ({detail})")


def train(config: TrainConfig, train_docs, dev_docs, out=None, log_path=None,
          model: ExtractionModel | None = None) -> Checkpoint:
    """Train on ``train_docs``, select the epoch with the best dev micro RE F1.

    Writes the best checkpoint to ``out`` (if given) every time it improves
    and one JSON line per epoch to ``log_path``.
    """
    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    model = model or ExtractionModel(config)
    aligned_train = [model.prepare(d) for d in train_docs]
    aligned_dev = [model.prepare(d) for d in dev_docs]

    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate,
                                  weight_decay=config.weight_decay)
    steps_per_epoch = max(1, math.ceil(len(aligned_train) / config.batch_size))
    total_steps = config.epochs * steps_per_epoch
    warmup = config.warmup_epochs * steps_per_epoch
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda s: lr_factor(s, warmup, total_steps))

    best = Checkpoint(model, best_dev_f1=-1.0)
    best_state, since_best, history = None, 0, []
    log_fh = open(log_path, "w") if log_path else None
    step = 0
    try:
        for epoch in range(config.epochs):
            model.train()
            t0 = time.time()
            order = rng.permutation(len(aligned_train))
            sums = {"loss": 0.0, "mention": 0.0, "relation": 0.0}
            for b in range(0, len(order), config.batch_size):
                batch = [aligned_train[i] for i in order[b:b + config.batch_size]]
                losses = [r for r in (model.training_loss(a, rng) for a in batch) if r is not None]
                if not losses:
                    continue
                total = torch.stack([r[0] for r in losses]).mean()
                parts = {"mention": float(torch.stack([r[1].detach() for r in losses]).mean()),
                         "relation": float(torch.stack([r[2].detach() for r in losses]).mean())}
                _check_finite(float(total.detach()), "loss", epoch, step, parts)
                optimizer.zero_grad()
                total.backward()
                torch.nn.utils.clip_grad_norm_(model.parameters(), config.max_grad_norm)
                optimizer.step()
                scheduler.step()
                step += 1
                sums["loss"] += float(total.detach())
                sums["mention"] += parts["mention"]
                sums["relation"] += parts["relation"]

            dev = evaluate_aligned(model, aligned_dev, config.k_eval_dev)
            row = {"epoch": epoch, "step": step, "lr": scheduler.get_last_lr()[0],
                   "seconds": round(time.time() - t0, 3),
                   **{f"train_{k}": v / steps_per_epoch for k, v in sums.items()},
                   **{f"dev_{k}": v for k, v in dev.items()}}
            history.append(row)
            if log_fh:
                log_fh.write(json.dumps(row) + "\n")
                log_fh.flush()
            log.info("epoch %d loss %.4f dev RE F1 %.4f", epoch, row["train_loss"], dev["re_f1"])

            if dev["re_f1"] > best.best_dev_f1:
                best.best_dev_f1, best.epoch = dev["re_f1"], epoch
                best_state = copy.deepcopy(model.state_dict())
                since_best = 0
                if out:
                    best.history = history
                    save_checkpoint(best, out)
            else:
                since_best += 1
                if since_best >= config.patience:
                    log.info("early stop after %d epochs without improvement", since_best)
                    break
    finally:
        if log_fh:
            log_fh.close()

    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    best.history = history
    if out:
        save_checkpoint(best, out)
    return best
