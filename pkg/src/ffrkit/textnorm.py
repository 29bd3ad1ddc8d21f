"""Diacritic-aware Unicode normalization and diacritic-family detection.

Canonical forms only (NFC/NFD); NFD_STRIP_MARKS decomposes and then drops
every combining mark (general category Mn), which is what collapses
tonal variants like tó/tò/tô onto a single skeleton.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .errors import EmptyCorpus

if TYPE_CHECKING:
    from .corpus import Corpus


class NormalizationForm(Enum):
    NFC = "nfc"
    NFD = "nfd"
    NFD_STRIP_MARKS = "strip"


# Open vowels common in Gbe orthographies have no precomposed+mark forms,
# so mark stripping alone never merges them with their Latin base letters.
# This optional fold reproduces the 4-way to/tó/tò/tô/tɔ collision.
OPEN_VOWEL_FOLD = {
    "ɔ": "o",  # ɔ
    "Ɔ": "O",  # Ɔ
    "ɛ": "e",  # ɛ
    "Ɛ": "E",  # Ɛ
}


def normalize(text: str, form: NormalizationForm) -> str:
    if form is NormalizationForm.NFC:
        return unicodedata.normalize("NFC", text)
    if form is NormalizationForm.NFD:
        return unicodedata.normalize("NFD", text)
    decomposed = unicodedata.normalize("NFD", text)
    return "".join(c for c in decomposed if unicodedata.category(c) != "Mn")


def is_normalized(text: str, form: NormalizationForm) -> bool:
    return normalize(text, form) == text


def strip_marks(text: str, fold_open_vowels: bool = False) -> str:
    """Accent-stripped skeleton of a token; optionally folds ɔ→o, ɛ→e."""
    out = normalize(text, NormalizationForm.NFD_STRIP_MARKS)
    if fold_open_vowels:
        out = "".join(OPEN_VOWEL_FOLD.get(c, c) for c in out)
    return out


@dataclass(frozen=True)
class DiacriticFamily:
    skeleton: str
    variants: frozenset[str]
    counts: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def find_diacritic_families(
    corpus: "Corpus",
    side: str = "source",
    lowercase: bool = True,
    fold_open_vowels: bool = False,
) -> list[DiacriticFamily]:
    """Group corpus tokens by accent-stripped skeleton.

    Only families with >= 2 distinct surface forms are returned, sorted by
    total frequency descending, ties by skeleton codepoint order.
    """
    if not corpus.pairs:
        raise EmptyCorpus("cannot analyze an empty corpus")
    if side not in ("source", "target"):
        raise ValueError(f"side must be source|target, got {side!r}")

    counts: dict[str, dict[str, int]] = {}
    for pair in corpus.pairs:
        text = pair.source if side == "source" else pair.target
        for token in text.split():
            if lowercase:
                token = token.lower()
            token = normalize(token, NormalizationForm.NFC)
            skel = strip_marks(token, fold_open_vowels=fold_open_vowels)
            fam = counts.setdefault(skel, {})
            fam[token] = fam.get(token, 0) + 1

    families = [
        DiacriticFamily(skel, frozenset(forms), dict(forms))
        for skel, forms in counts.items()
        if len(forms) >= 2
    ]
    families.sort(key=lambda f: (-f.total, f.skeleton))
    return families
