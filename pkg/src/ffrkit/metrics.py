"""Automatic translation metrics (BLEU, GLEU) and CMS score arithmetic.

All scores live in [0, 1]; multiply by 100 for percentage-style reporting.
Sentences are plain token lists; use ffrkit.tokenizer.tokenize upstream.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import DomainError, EmptyHypothesisSet, LengthMismatch, NoScores


class Smoothing(Enum):
    NONE = "none"
    ADD_ONE_2PLUS = "add_one_2plus"


@dataclass(frozen=True)
class BleuReport:
    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int


@dataclass(frozen=True)
class GleuReport:
    score: float
    match_count: int
    hyp_ngrams: int
    ref_ngrams: int


@dataclass(frozen=True)
class CmsScorePair:
    t: float
    t_r: float
    alpha: float

    @property
    def t_total(self) -> float:
        return cms_total(self.t, self.t_r, self.alpha)


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    """Multiset of the n-grams of a token list; empty when len(tokens) < n."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _clipped_matches(hyp: Sequence[str], ref: Sequence[str], n: int) -> tuple[int, int]:
    hyp_counts = ngram_counts(hyp, n)
    ref_counts = ngram_counts(ref, n)
    matched = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
    return matched, sum(hyp_counts.values())


def bleu_corpus(
    refs: Sequence[Sequence[str]],
    hyps: Sequence[Sequence[str]],
    max_n: int = 4,
) -> BleuReport:
    """Corpus BLEU with clipped modified n-gram precision, single reference.

    Counts are pooled over the whole corpus before taking precisions;
    BP = min(1, exp(1 - ref_len/hyp_len)).
    """
    if len(refs) != len(hyps):
        raise LengthMismatch(f"{len(refs)} references vs {len(hyps)} hypotheses")
    if not hyps:
        raise EmptyHypothesisSet("no hypotheses to score")

    matched = [0] * max_n
    total = [0] * max_n
    hyp_len = 0
    ref_len = 0
    for ref, hyp in zip(refs, hyps):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            m, t = _clipped_matches(hyp, ref, n)
            matched[n - 1] += m
            total[n - 1] += t

    precisions = tuple(m / t if t > 0 else 0.0 for m, t in zip(matched, total))
    if hyp_len == 0:
        bp = 0.0
    else:
        bp = min(1.0, math.exp(1.0 - ref_len / hyp_len))

    if any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / max_n)
    return BleuReport(score, precisions, bp, hyp_len, ref_len)


def bleu_sentence(
    ref: Sequence[str],
    hyp: Sequence[str],
    max_n: int = 4,
    smoothing: Smoothing = Smoothing.ADD_ONE_2PLUS,
) -> float:
    """Sentence BLEU; ADD_ONE_2PLUS adds one to numerator and denominator
    of the n >= 2 precisions only."""
    if not ref:
        raise EmptyHypothesisSet("reference must be non-empty")
    if not hyp:
        return 0.0

    log_sum = 0.0
    for n in range(1, max_n + 1):
        m, t = _clipped_matches(hyp, ref, n)
        if smoothing is Smoothing.ADD_ONE_2PLUS and n >= 2:
            m, t = m + 1, t + 1
        if m == 0 or t == 0:
            return 0.0
        log_sum += math.log(m / t)
    bp = min(1.0, math.exp(1.0 - len(ref) / len(hyp)))
    return bp * math.exp(log_sum / max_n)


def gleu_sentence(
    ref: Sequence[str],
    hyp: Sequence[str],
    min_n: int = 1,
    max_n: int = 4,
) -> GleuReport:
    """Sentence GLEU: min(precision, recall) over pooled 1..4-gram counts."""
    if not ref:
        raise EmptyHypothesisSet("reference must be non-empty")
    match = 0
    hyp_total = 0
    ref_total = 0
    for n in range(min_n, max_n + 1):
        hyp_counts = ngram_counts(hyp, n)
        ref_counts = ngram_counts(ref, n)
        match += sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
        hyp_total += sum(hyp_counts.values())
        ref_total += sum(ref_counts.values())
    if hyp_total == 0 or ref_total == 0:
        score = 0.0
    else:
        score = min(match / hyp_total, match / ref_total)
    return GleuReport(score, match, hyp_total, ref_total)


def cms_total(t: float, t_r: float, alpha: float) -> float:
    """Two-phase human score blend: alpha*t + (1-alpha)*t_r."""
    for name, v in (("t", t), ("t_r", t_r), ("alpha", alpha)):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"{name} must be in [0,1], got {v}")
    return alpha * t + (1.0 - alpha) * t_r


def cms_aggregate(annotator_scores: Iterable[CmsScorePair]) -> float:
    """Item-level CMS: mean of the annotators' blended totals."""
    totals = [s.t_total for s in annotator_scores]
    if not totals:
        raise NoScores("at least one annotator score required")
    return sum(totals) / len(totals)


def cms_task_mean(item_scores: Iterable[float]) -> float:
    """Task-level CMS: mean over per-item CMS values."""
    scores = list(item_scores)
    if not scores:
        raise NoScores("at least one item required")
    return sum(scores) / len(scores)
