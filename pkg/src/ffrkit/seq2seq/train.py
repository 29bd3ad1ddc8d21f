"""Seeded, deterministic training loop with Adam/SGD and gradient clipping."""

from __future__ import annotations

import copy
from typing import Sequence

import numpy as np

from ..errors import EmptyCorpus
from ..metrics import bleu_corpus
from ..tokenizer import EOS, SOS, pad_batch
from .config import EpochStats, Optimizer, TrainConfig, TrainHistory
from .model import ModelParams, backward, clip_gradients, forward, translate_ids

# (src_ids, tgt_ids) with target already wrapped in SOS/EOS
Pair = tuple[list[int], list[int]]

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class _AdamState:
    def __init__(self, params: ModelParams):
        self.m = {k: np.zeros_like(v) for k, v in params.tensors.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.tensors.items()}
        self.t = 0

    def step(self, params: ModelParams, grads: dict[str, np.ndarray], lr: float) -> None:
        self.t += 1
        bc1 = 1.0 - ADAM_BETA1**self.t
        bc2 = 1.0 - ADAM_BETA2**self.t
        for k, g in grads.items():
            self.m[k] = ADAM_BETA1 * self.m[k] + (1.0 - ADAM_BETA1) * g
            self.v[k] = ADAM_BETA2 * self.v[k] + (1.0 - ADAM_BETA2) * g * g
            params.tensors[k] -= lr * (self.m[k] / bc1) / (np.sqrt(self.v[k] / bc2) + ADAM_EPS)


def _batches(pairs: Sequence[Pair], batch_size: int, rng: np.random.Generator):
    order = rng.permutation(len(pairs))
    for start in range(0, len(pairs), batch_size):
        yield [pairs[i] for i in order[start : start + batch_size]]


def _batch_arrays(batch: Sequence[Pair]):
    src, src_mask = pad_batch([p[0] for p in batch])
    tgt, tgt_mask = pad_batch([p[1] for p in batch])
    return src, src_mask, tgt, tgt_mask


def evaluate_loss(params: ModelParams, pairs: Sequence[Pair], batch_size: int = 64) -> float:
    """Mean token cross-entropy with full teacher forcing."""
    total = 0.0
    n_tokens = 0.0
    rng = np.random.default_rng(0)
    for start in range(0, len(pairs), batch_size):
        batch = pairs[start : start + batch_size]
        cache = forward(params, *_batch_arrays(batch), teacher_forcing=1.0, rng=rng)
        total += cache.loss * cache.n_tokens
        n_tokens += cache.n_tokens
    return total / n_tokens


def evaluate_bleu(params: ModelParams, pairs: Sequence[Pair]) -> float:
    """Greedy-decode BLEU against the gold targets (ids as tokens)."""
    refs, hyps = [], []
    for src_ids, tgt_ids in pairs:
        out, _ = translate_ids(params, src_ids)
        refs.append([str(i) for i in tgt_ids if i not in (SOS, EOS)])
        hyps.append([str(i) for i in out])
    return bleu_corpus(refs, hyps).score


def token_accuracy(params: ModelParams, pairs: Sequence[Pair]) -> float:
    """Greedy-decode exact token accuracy against gold targets."""
    correct = 0
    total = 0
    for src_ids, tgt_ids in pairs:
        gold = [i for i in tgt_ids if i not in (SOS, EOS)]
        out, _ = translate_ids(params, src_ids, max_len=len(gold) + 5)
        total += len(gold)
        correct += sum(1 for a, b in zip(out, gold) if a == b)
    return correct / total if total else 0.0


def train(
    params: ModelParams,
    train_pairs: Sequence[Pair],
    valid_pairs: Sequence[Pair],
    cfg: TrainConfig,
) -> tuple[ModelParams, TrainHistory]:
    """Train in place on encoded pairs; returns the best-valid-loss params.

    Deterministic for a fixed cfg.seed: batch order, teacher-forcing coin
    flips, and updates all derive from one seeded generator.
    """
    if not train_pairs:
        raise EmptyCorpus("training set is empty")

    history = TrainHistory()
    adam = _AdamState(params) if cfg.optimizer is Optimizer.ADAM else None
    best_loss = float("inf")
    best_params = params.copy()

    for epoch in range(cfg.epochs):
        rng = np.random.default_rng((cfg.seed, epoch))
        epoch_loss = 0.0
        epoch_tokens = 0.0
        for batch in _batches(train_pairs, cfg.batch_size, rng):
            cache = forward(
                params, *_batch_arrays(batch),
                teacher_forcing=cfg.teacher_forcing, rng=rng,
            )
            grads = backward(cache)
            clip_gradients(grads, cfg.grad_clip)
            if adam is not None:
                adam.step(params, grads, cfg.learning_rate)
            else:
                for k, g in grads.items():
                    params.tensors[k] -= cfg.learning_rate * g
            epoch_loss += cache.loss * cache.n_tokens
            epoch_tokens += cache.n_tokens

        valid_loss = evaluate_loss(params, valid_pairs) if valid_pairs else float("nan")
        valid_bleu = (
            evaluate_bleu(params, valid_pairs)
            if valid_pairs and cfg.compute_valid_bleu
            else None
        )
        history.append(
            EpochStats(epoch, epoch_loss / epoch_tokens, valid_loss, valid_bleu)
        )
        if valid_pairs and valid_loss < best_loss:
            best_loss = valid_loss
            best_params = params.copy()

    if not valid_pairs:
        best_params = params.copy()
    return best_params, history
