from .aggregate import aggregate_runs, load_runs, run_seeds_aggregate
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .config import PUBLISHED_LEARNING_RATES, TrainConfig
from .model import DocumentPrediction, ExtractionModel
from .predict import predict_corpus, predict_document, read_predictions, write_predictions
from .train import evaluate_aligned, lr_factor, train

__all__ = [
    "aggregate_runs", "load_runs", "run_seeds_aggregate", "Checkpoint", "load_checkpoint",
    "save_checkpoint", "PUBLISHED_LEARNING_RATES", "TrainConfig", "DocumentPrediction",
    "ExtractionModel", "predict_corpus", "predict_document", "read_predictions",
    "write_predictions", "evaluate_aligned", "lr_factor", "train",
]
