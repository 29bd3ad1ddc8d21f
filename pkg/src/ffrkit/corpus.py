"""Parallel corpus loading, rule-based cleaning, length profiling, splitting.

File formats:
  TSV        - UTF-8, LF, exactly one tab per row, no header by default.
  PAIRED_TXT - two files (source/target), one sentence per line, equal counts.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

from .errors import (
    EmptyCorpus,
    InvalidUtf8,
    IoError,
    LineCountMismatch,
    MalformedRow,
    SpecMismatch,
)


class Origin(Enum):
    JW = "JW"
    BL = "BL"
    OTHER = "OTHER"


class CorpusFormat(Enum):
    TSV = "tsv"
    PAIRED_TXT = "paired_txt"


@dataclass(frozen=True)
class SentencePair:
    id: int
    source: str
    target: str
    origin: Origin = Origin.OTHER


@dataclass(frozen=True)
class Corpus:
    pairs: tuple[SentencePair, ...]
    source_lang: str = "fon"
    target_lang: str = "fr"

    def __post_init__(self):
        ids = [p.id for p in self.pairs]
        if len(set(ids)) != len(ids):
            raise ValueError("pair ids must be unique within a corpus")

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class CleanReport:
    input_count: int
    output_count: int
    dropped_by_rule: dict[str, int]


@dataclass(frozen=True)
class SideBuckets:
    very_short: int
    short: int
    medium: int
    long: int
    max_len: int

    @property
    def total(self) -> int:
        return self.very_short + self.short + self.medium + self.long


@dataclass(frozen=True)
class LengthBucketReport:
    source: SideBuckets
    target: SideBuckets
    total: int


@dataclass(frozen=True)
class SplitSpec:
    train: float
    valid: float
    test: float
    seed: int = 0

    def counts_for(self, n: int) -> tuple[int, int, int]:
        vals = (self.train, self.valid, self.test)
        if all(float(v).is_integer() and v >= 1 or v == 0 for v in vals) and sum(vals) > 1.0:
            counts = tuple(int(v) for v in vals)
            if sum(counts) != n:
                raise SpecMismatch(f"counts {counts} do not sum to corpus size {n}")
            return counts
        if abs(sum(vals) - 1.0) > 1e-9:
            raise SpecMismatch(f"fractions {vals} do not sum to 1")
        n_train = round(n * self.train)
        n_valid = round(n * self.valid)
        n_test = n - n_train - n_valid
        if n_test < 0:
            raise SpecMismatch("rounding produced a negative test split")
        return n_train, n_valid, n_test


_CONTROL_RE = re.compile(r"[\x00-\x08\x0b-\x1f\x7f]")


def _read_utf8_lines(path: Path) -> list[str]:
    try:
        data = path.read_bytes()
    except OSError as e:
        raise IoError(str(e)) from e
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise InvalidUtf8(f"{path}: {e}") from e
    if text.endswith("\n"):
        text = text[:-1]
    return text.split("\n") if text else []


def load_parallel(
    path: str | Path,
    format: CorpusFormat = CorpusFormat.TSV,
    target_path: str | Path | None = None,
    skip_header: bool = False,
    source_lang: str = "fon",
    target_lang: str = "fr",
) -> Corpus:
    path = Path(path)
    if format is CorpusFormat.TSV:
        lines = _read_utf8_lines(path)
        if skip_header and lines:
            lines = lines[1:]
        pairs = []
        for i, line in enumerate(lines):
            cols = line.split("\t")
            if len(cols) != 2:
                raise MalformedRow(f"{path}:{i + 1}: expected 2 columns, got {len(cols)}")
            pairs.append(SentencePair(len(pairs), cols[0], cols[1]))
        return Corpus(tuple(pairs), source_lang, target_lang)

    if target_path is None:
        raise IoError("PAIRED_TXT requires a target_path")
    src_lines = _read_utf8_lines(path)
    tgt_lines = _read_utf8_lines(Path(target_path))
    if len(src_lines) != len(tgt_lines):
        raise LineCountMismatch(
            f"{len(src_lines)} source lines vs {len(tgt_lines)} target lines"
        )
    pairs = [SentencePair(i, s, t) for i, (s, t) in enumerate(zip(src_lines, tgt_lines))]
    return Corpus(tuple(pairs), source_lang, target_lang)


def export(
    corpus: Corpus,
    path: str | Path,
    format: CorpusFormat = CorpusFormat.TSV,
    target_path: str | Path | None = None,
) -> None:
    path = Path(path)
    try:
        if format is CorpusFormat.TSV:
            with path.open("w", encoding="utf-8", newline="\n") as f:
                for p in corpus.pairs:
                    f.write(f"{p.source}\t{p.target}\n")
        else:
            if target_path is None:
                raise IoError("PAIRED_TXT requires a target_path")
            with path.open("w", encoding="utf-8", newline="\n") as f:
                for p in corpus.pairs:
                    f.write(p.source + "\n")
            with Path(target_path).open("w", encoding="utf-8", newline="\n") as f:
                for p in corpus.pairs:
                    f.write(p.target + "\n")
    except OSError as e:
        raise IoError(str(e)) from e


# --- cleaning ---------------------------------------------------------------
# Rules are applied in catalogue order. Transform rules rewrite the pair;
# drop rules return True when the pair must go.

def _collapse_ws(text: str) -> str:
    return " ".join(text.split())


def _has_letter(text: str) -> bool:
    return any(c.isalpha() for c in text)


def rule_strip_control_chars(pair: SentencePair) -> SentencePair:
    return SentencePair(
        pair.id,
        _CONTROL_RE.sub("", pair.source),
        _CONTROL_RE.sub("", pair.target),
        pair.origin,
    )


def rule_collapse_whitespace(pair: SentencePair) -> SentencePair:
    return SentencePair(pair.id, _collapse_ws(pair.source), _collapse_ws(pair.target), pair.origin)


def rule_drop_empty(pair: SentencePair) -> bool:
    return not pair.source.strip() or not pair.target.strip()


def rule_drop_no_letters(pair: SentencePair) -> bool:
    return not _has_letter(pair.source) or not _has_letter(pair.target)


def make_drop_length_ratio(max_ratio: float = 3.0) -> Callable[[SentencePair], bool]:
    def rule(pair: SentencePair) -> bool:
        ns, nt = len(pair.source.split()), len(pair.target.split())
        if ns == 0 or nt == 0:
            return True
        return max(ns, nt) / min(ns, nt) > max_ratio

    return rule


TRANSFORM_RULES: dict[str, Callable[[SentencePair], SentencePair]] = {
    "strip_control_chars": rule_strip_control_chars,
    "collapse_whitespace": rule_collapse_whitespace,
}

DROP_RULES: dict[str, Callable[[SentencePair], bool]] = {
    "drop_empty": rule_drop_empty,
    "drop_no_letters": rule_drop_no_letters,
    "drop_length_ratio": make_drop_length_ratio(),
}

DEFAULT_RULES = (
    "strip_control_chars",
    "collapse_whitespace",
    "drop_empty",
    "drop_no_letters",
    "drop_length_ratio",
    "drop_exact_duplicates",
)


def clean(
    corpus: Corpus,
    rules: Sequence[str] = DEFAULT_RULES,
    max_length_ratio: float = 3.0,
) -> tuple[Corpus, CleanReport]:
    """Apply the rule catalogue in order; never fails, only drops.

    drop_exact_duplicates keys on the whitespace-collapsed (source, target)
    pair and keeps the first occurrence.
    """
    known = set(TRANSFORM_RULES) | set(DROP_RULES) | {"drop_exact_duplicates"}
    unknown = [r for r in rules if r not in known]
    if unknown:
        raise ValueError(f"unknown cleaning rules: {unknown}")

    dropped: dict[str, int] = {r: 0 for r in rules}
    seen: set[tuple[str, str]] = set()
    survivors: list[SentencePair] = []

    for pair in corpus.pairs:
        keep = True
        for rule in rules:
            if rule in TRANSFORM_RULES:
                pair = TRANSFORM_RULES[rule](pair)
            elif rule == "drop_exact_duplicates":
                key = (_collapse_ws(pair.source), _collapse_ws(pair.target))
                if key in seen:
                    dropped[rule] += 1
                    keep = False
                    break
                seen.add(key)
            else:
                drop = (
                    make_drop_length_ratio(max_length_ratio)
                    if rule == "drop_length_ratio"
                    else DROP_RULES[rule]
                )
                if drop(pair):
                    dropped[rule] += 1
                    keep = False
                    break
        if keep:
            survivors.append(pair)

    out = Corpus(tuple(survivors), corpus.source_lang, corpus.target_lang)
    report = CleanReport(len(corpus), len(out), {r: c for r, c in dropped.items() if c})
    return out, report


DEFAULT_BOUNDARIES = (5, 10, 30)


def _bucket_side(lengths: list[int], boundaries: tuple[int, int, int]) -> SideBuckets:
    b1, b2, b3 = boundaries
    vs = sum(1 for n in lengths if n <= b1)
    sh = sum(1 for n in lengths if b1 < n <= b2)
    md = sum(1 for n in lengths if b2 < n <= b3)
    lg = sum(1 for n in lengths if n > b3)
    return SideBuckets(vs, sh, md, lg, max(lengths))


def length_stats(
    corpus: Corpus, boundaries: tuple[int, int, int] = DEFAULT_BOUNDARIES
) -> LengthBucketReport:
    """Whitespace-token length histogram per side, paper-style buckets
    [1-5], [6-10], [11-30], [31-max]."""
    if not corpus.pairs:
        raise EmptyCorpus("length_stats requires a non-empty corpus")
    if not (boundaries[0] < boundaries[1] < boundaries[2]):
        raise ValueError(f"boundaries must be strictly increasing, got {boundaries}")
    src_lens = [len(p.source.split()) for p in corpus.pairs]
    tgt_lens = [len(p.target.split()) for p in corpus.pairs]
    return LengthBucketReport(
        source=_bucket_side(src_lens, boundaries),
        target=_bucket_side(tgt_lens, boundaries),
        total=len(corpus),
    )


def split(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus, Corpus]:
    """Seeded shuffle then exact partition into train/valid/test."""
    n_train, n_valid, n_test = spec.counts_for(len(corpus))
    order = list(range(len(corpus)))
    random.Random(spec.seed).shuffle(order)
    shuffled = [corpus.pairs[i] for i in order]
    parts = (
        shuffled[:n_train],
        shuffled[n_train : n_train + n_valid],
        shuffled[n_train + n_valid :],
    )
    assert len(parts[2]) == n_test
    return tuple(
        Corpus(tuple(p), corpus.source_lang, corpus.target_lang) for p in parts
    )
