"""Fon-French low-resource MT toolkit.

Corpus cleaning and analysis, diacritic-preserving Unicode normalization,
word-level tokenization, a GRU encoder-decoder with additive attention
trained from scratch, BLEU/GLEU metrics, and a two-phase human evaluation
(CMS) service.
"""

__version__ = "0.1.0"
