"""Model and training configuration."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from enum import Enum


@dataclass(frozen=True)
class ModelConfig:
    src_vocab: int
    tgt_vocab: int
    embed_dim: int = 512
    hidden_dim: int = 128
    attn_dim: int = 30
    num_layers: int = 1
    max_src_len: int = 120
    max_tgt_len: int = 120
    seed: int = 0

    def __post_init__(self):
        for name in ("src_vocab", "tgt_vocab", "embed_dim", "hidden_dim",
                     "attn_dim", "num_layers", "max_src_len", "max_tgt_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**d)


class Optimizer(Enum):
    SGD = "sgd"
    ADAM = "adam"


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: Optimizer = Optimizer.ADAM
    teacher_forcing: float = 1.0
    grad_clip: float = 5.0
    seed: int = 0
    compute_valid_bleu: bool = True

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if not 0.0 <= self.teacher_forcing <= 1.0:
            raise ValueError("teacher_forcing must be in [0,1]")


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    valid_loss: float
    valid_bleu: float | None = None


@dataclass
class TrainHistory:
    epochs: list[EpochStats] = field(default_factory=list)

    def append(self, stats: EpochStats) -> None:
        self.epochs.append(stats)

    def __len__(self) -> int:
        return len(self.epochs)
