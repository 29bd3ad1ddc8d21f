from .config import EpochStats, ModelConfig, Optimizer, TrainConfig, TrainHistory
from .model import (
    ForwardCache,
    ModelParams,
    attend,
    backward,
    clip_gradients,
    forward,
    gru_cell,
    init_bound,
    init_model,
    tensor_shapes,
    translate,
    translate_ids,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .train import evaluate_bleu, evaluate_loss, token_accuracy, train

__all__ = [
    "EpochStats", "ModelConfig", "Optimizer", "TrainConfig", "TrainHistory",
    "ForwardCache", "ModelParams", "attend", "backward", "clip_gradients",
    "forward", "gru_cell", "init_bound", "init_model", "tensor_shapes",
    "translate", "translate_ids", "load_checkpoint", "save_checkpoint",
    "evaluate_bleu", "evaluate_loss", "token_accuracy", "train",
]
