"""Independent brute-force reference implementations used by the tests."""

import math

import numpy as np
import torch


def central_difference(fn, x: torch.Tensor, eps: float = 1e-6) -> torch.Tensor:
    """Numerical gradient of scalar ``fn`` at float64 ``x``."""
    grad = torch.zeros_like(x)
    flat, gflat = x.detach().clone().view(-1), grad.view(-1)
    for i in range(flat.numel()):
        old = flat[i].item()
        flat[i] = old + eps
        hi = float(fn(flat.view_as(x)))
        flat[i] = old - eps
        lo = float(fn(flat.view_as(x)))
        flat[i] = old
        gflat[i] = (hi - lo) / (2 * eps)
    return grad


def analytic_gradient(fn, x: torch.Tensor) -> torch.Tensor:
    x = x.detach().clone().requires_grad_(True)
    fn(x).backward()
    return x.grad


def relative_error(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-12))


def span_scores_loop(emb, protos):
    out = []
    for e in emb:
        best = -math.inf
        for p in protos:
            best = max(best, sum(float(a) * float(b) for a, b in zip(e, p)))
        out.append(best)
    return out


def mention_loss_loop(true_emb, labels, false_emb, protos, margin):
    total, n = 0.0, 0
    for e_t, lab in zip(true_emb, labels):
        p = protos[lab]
        for e_f in false_emb:
            total += max(0.0, margin - float(np.dot(p, e_t)) + float(np.dot(p, e_f)))
            n += 1
    return total / n


def atl_loop(logits, labels, num_rel=4):
    """Adaptive thresholding loss per pair, written out with explicit sums."""
    losses = []
    for row, lab in zip(np.asarray(logits, dtype=float), np.asarray(labels, dtype=bool)):
        th = float(np.max(row[num_rel:]))
        pos = [float(row[r]) for r in range(num_rel) if lab[r]]
        neg = [float(row[r]) for r in range(num_rel) if not lab[r]]
        l1 = 0.0
        for v in pos:
            denom = sum(math.exp(u) for u in pos) + math.exp(th)
            l1 -= math.log(math.exp(v) / denom)
        l2 = -math.log(math.exp(th) / (math.exp(th) + sum(math.exp(u) for u in neg)))
        losses.append(l1 + l2)
    return losses


def suppression_loop(preds):
    """Pairwise suppression: a prediction survives unless a kept, higher-ranked
    prediction of the same type overlaps it on both head and tail."""
    def overlap(a, b):
        return a[0] < b[1] and b[0] < a[1]

    ranked = sorted(preds, key=lambda p: (-p.score, p.head, p.tail, p.type))
    kept = []
    for i, p in enumerate(ranked):
        suppressed = False
        for q in kept:
            if q.type == p.type and overlap(q.head, p.head) and overlap(q.tail, p.tail):
                suppressed = True
        if not suppressed:
            kept.append(p)
    return kept
