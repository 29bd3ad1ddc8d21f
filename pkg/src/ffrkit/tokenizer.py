"""Word-level tokenization (filter-none), vocabulary, encoding, padding.

Tokenization splits on whitespace only and never removes or alters any
code point, so diacritics survive intact. Lowercasing is a config knob
(default on) applied at vocab build / encode time, not by tokenize itself.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCorpus, SequenceTooLong

PAD, SOS, EOS, UNK = 0, 1, 2, 3
SPECIALS = ("<pad>", "<sos>", "<eos>", "<unk>")
VOCAB_FILE_VERSION = 1


def tokenize(sentence: str, lowercase: bool = False) -> list[str]:
    if lowercase:
        sentence = sentence.lower()
    return sentence.split()


@dataclass(frozen=True)
class Vocabulary:
    tokens: tuple[str, ...]  # full list, specials at ids 0-3
    frequency: dict[str, int]
    lowercase: bool = True

    def __post_init__(self):
        if self.tokens[:4] != SPECIALS:
            raise ValueError("ids 0-3 are reserved for PAD/SOS/EOS/UNK")
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("duplicate tokens in vocabulary")
        object.__setattr__(
            self, "_index", {tok: i for i, tok in enumerate(self.tokens)}
        )

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        if self.lowercase:
            token = token.lower()
        return self._index.get(token, UNK)

    def token_of(self, idx: int) -> str:
        return self.tokens[idx]

    def save(self, path: str | Path) -> None:
        payload = {
            "version": VOCAB_FILE_VERSION,
            "specials": list(SPECIALS),
            "lowercase": self.lowercase,
            "tokens": list(self.tokens[4:]),
            "frequency": self.frequency,
        }
        Path(path).write_text(
            json.dumps(payload, ensure_ascii=False, indent=0), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            tokens=tuple(payload["specials"]) + tuple(payload["tokens"]),
            frequency={k: int(v) for k, v in payload.get("frequency", {}).items()},
            lowercase=bool(payload.get("lowercase", True)),
        )


def build_vocab(
    sentences: Iterable[str],
    min_freq: int = 1,
    max_size: int | None = None,
    lowercase: bool = True,
) -> Vocabulary:
    """Frequency-sorted vocabulary; ties broken by first occurrence."""
    if min_freq < 1:
        raise ValueError(f"min_freq must be >= 1, got {min_freq}")
    counts: Counter[str] = Counter()
    first_seen: dict[str, int] = {}
    n_sentences = 0
    for sentence in sentences:
        n_sentences += 1
        for tok in tokenize(sentence, lowercase=lowercase):
            counts[tok] += 1
            first_seen.setdefault(tok, len(first_seen))
    if n_sentences == 0:
        raise EmptyCorpus("cannot build a vocabulary from zero sentences")

    ordered = sorted(counts, key=lambda t: (-counts[t], first_seen[t]))
    ordered = [t for t in ordered if counts[t] >= min_freq]
    if max_size is not None:
        ordered = ordered[: max(0, max_size - len(SPECIALS))]
    return Vocabulary(
        tokens=SPECIALS + tuple(ordered),
        frequency={t: counts[t] for t in ordered},
        lowercase=lowercase,
    )


def encode(sentence: str, vocab: Vocabulary, wrap: bool = False) -> list[int]:
    ids = [vocab.id_of(t) for t in tokenize(sentence)]
    if wrap:
        return [SOS] + ids + [EOS]
    return ids


def decode(ids: Sequence[int], vocab: Vocabulary, strip_specials: bool = True) -> str:
    toks = [vocab.token_of(i) for i in ids]
    if strip_specials:
        toks = [t for t in toks if t not in SPECIALS]
    return " ".join(toks)


def pad_batch(
    seqs: Sequence[Sequence[int]], pad_to: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Right-pad with PAD=0; mask is 1 on real tokens, 0 on padding."""
    if not seqs:
        raise ValueError("pad_batch requires at least one sequence")
    max_len = max(len(s) for s in seqs)
    if pad_to is None:
        pad_to = max_len
    elif max_len > pad_to:
        raise SequenceTooLong(f"longest sequence {max_len} exceeds pad_to {pad_to}")
    batch = np.full((len(seqs), pad_to), PAD, dtype=np.int64)
    mask = np.zeros((len(seqs), pad_to), dtype=np.float64)
    for i, s in enumerate(seqs):
        batch[i, : len(s)] = s
        mask[i, : len(s)] = 1.0
    return batch, mask
