"""Command line entry point: train, predict, evaluate, sweep, aggregate, synth."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigError, SymdescError

log = logging.getLogger("symdesc")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _emit(obj, out=None):
    text = json.dumps(obj, indent=1, ensure_ascii=False)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_train(args):
    from .ingest import load_corpus
    from .pipeline import TrainConfig, train

    config = TrainConfig.from_json(args.config) if args.config else TrainConfig()
    train_docs, dev_docs = load_corpus(args.train), load_corpus(args.dev)
    out = Path(args.out)
    ckpt = train(config, train_docs, dev_docs, out=out,
                 log_path=out.with_name(out.name + ".log.jsonl"))
    summary = {"checkpoint": str(out), "best_dev_f1": ckpt.best_dev_f1, "epoch": ckpt.epoch,
               "epochs_run": len(ckpt.history), "seed": config.seed}
    if ckpt.history:
        best_row = next(r for r in ckpt.history if r["epoch"] == ckpt.epoch)
        summary.update({k: v for k, v in best_row.items() if k.startswith("dev_")})
    out.with_name(out.name + ".metrics.json").write_text(json.dumps(summary, indent=1))
    _emit(summary)


def _read_input(path):
    from .ingest import RawDocument, load_corpus

    path = Path(path)
    if path.suffix in (".json", ".jsonl"):
        return load_corpus(path)
    return [RawDocument(id=path.stem, text=path.read_text(encoding="utf-8"))]


def cmd_predict(args):
    from .pipeline import load_checkpoint, predict_corpus, write_predictions

    ckpt = load_checkpoint(args.ckpt)
    payload = predict_corpus(ckpt.model, _read_input(args.input), args.k)
    write_predictions(payload, args.out)
    n_rel = sum(len(d["relations"]) for d in payload["documents"])
    _emit({"predictions": args.out, "documents": len(payload["documents"]), "relations": n_rel})


def cmd_evaluate(args):
    from .evaluation import MatchSpec, ner_evaluate, re_evaluate
    from .ingest import load_corpus
    from .pipeline.predict import eval_documents, read_predictions

    gold = load_corpus(args.gold)
    pred_docs, gold_docs, ner_pred, ner_gold = eval_documents(read_predictions(args.pred), gold)
    report = {
        "ner": ner_evaluate(ner_pred, ner_gold).to_dict(),
        "re": {"strict": re_evaluate(pred_docs, gold_docs).to_dict()},
    }
    if args.iou is not None:
        report["re"]["iou"] = re_evaluate(pred_docs, gold_docs,
                                          MatchSpec("iou", args.iou)).to_dict()
        report["re"]["iou"]["threshold"] = args.iou
    _emit(report, args.out)


def cmd_sweep(args):
    from .evaluation import k_sweep, write_sweep_csv
    from .ingest import load_corpus
    from .pipeline import load_checkpoint

    if args.k_min <= 0 or args.k_step <= 0 or args.k_max < args.k_min:
        raise ConfigError("need 0 < k-min <= k-max and k-step > 0")
    model = load_checkpoint(args.ckpt).model
    aligned = [model.prepare(d) for d in load_corpus(args.gold)]
    rows = k_sweep(model, aligned, range(args.k_min, args.k_max + 1, args.k_step))
    write_sweep_csv(rows, args.out)
    _emit({"csv": args.out, "rows": len(rows)})


def cmd_aggregate(args):
    from .pipeline import aggregate_runs, load_runs

    runs = load_runs(args.runs)
    if len(runs) < 2:
        raise ConfigError(f"need at least two runs, found {len(runs)} in {args.runs}")
    _emit({"runs": len(runs), "aggregate": aggregate_runs(runs)}, args.out)


def cmd_synth(args):
    from .ingest import save_corpus
    from .synthetic import make_planted_corpus

    save_corpus(make_planted_corpus(args.docs, seed=args.seed), args.out)
    _emit({"corpus": args.out, "documents": args.docs})


def build_parser():
    p = _Parser(prog="symdesc", description="Symbol and description extraction from LaTeX.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("train", help="train and keep the best dev checkpoint")
    s.add_argument("--config", help="flat JSON mirroring TrainConfig")
    s.add_argument("--train", required=True)
    s.add_argument("--dev", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", help="extract mentions and relations")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--in", dest="input", required=True, help=".tex/.txt file or a corpus")
    s.add_argument("--k", type=int, default=400)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("evaluate", help="score predictions against gold")
    s.add_argument("--pred", required=True)
    s.add_argument("--gold", required=True)
    s.add_argument("--iou", type=float, nargs="?", const=0.67, default=None)
    s.add_argument("--out")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("sweep", help="relation F1 and entity recall across k (CSV)")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--gold", required=True)
    s.add_argument("--k-min", type=int, default=10)
    s.add_argument("--k-max", type=int, default=400)
    s.add_argument("--k-step", type=int, default=10)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("aggregate", help="median and std over per-run JSON files")
    s.add_argument("--runs", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_aggregate)

    s = sub.add_parser("synth", help="write a planted synthetic corpus")
    s.add_argument("--docs", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except SymdescError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
