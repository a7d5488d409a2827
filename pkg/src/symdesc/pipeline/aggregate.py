"""Median and population standard deviation across seeded runs."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import TrainConfig


def aggregate_runs(runs: list[dict]) -> dict:
    """Per-metric median and population std over numeric fields shared by all runs."""
    if not runs:
        raise ValueError("no runs to aggregate")
    keys = set(runs[0])
    for r in runs[1:]:
        keys &= set(r)
    out = {}
    for key in sorted(keys):
        values = [r[key] for r in runs]
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            continue
        arr = np.asarray(values, dtype=float)
        out[key] = {"median": float(np.median(arr)), "std": float(arr.std(ddof=0))}
    return out


def load_runs(directory) -> list[dict]:
    files = sorted(Path(directory).glob("*.json"))
    if not files:
        raise FileNotFoundError(f"no run JSON files in {directory}")
    return [json.loads(f.read_text()) for f in files]


def run_seeds_aggregate(config: TrainConfig, train_docs, dev_docs, seeds=(0, 1, 2),
                        out_dir=None) -> dict:
    """Train once per seed and aggregate the best-epoch dev metrics."""
    from dataclasses import replace

    from .train import evaluate_aligned, train

    if len(seeds) < 2:
        raise ValueError("need at least two seeds")
    runs = []
    for seed in seeds:
        cfg = replace(config, seed=seed)
        ckpt = train(cfg, train_docs, dev_docs)
        aligned = [ckpt.model.prepare(d) for d in dev_docs]
        metrics = {"seed": seed, "best_epoch": ckpt.epoch,
                   **evaluate_aligned(ckpt.model, aligned, cfg.k_eval_dev)}
        runs.append(metrics)
        if out_dir:
            path = Path(out_dir)
            path.mkdir(parents=True, exist_ok=True)
            (path / f"run_seed{seed}.json").write_text(json.dumps(metrics, indent=1))
    return {"runs": runs, "aggregate": aggregate_runs(runs)}
