"""Combinatorial machinery for one-relator relative presentations.

Subpackages cover exact word arithmetic in free products with a stable
letter, normalization into the pinch form, Howie sphere diagrams, the
standard multiple car motion with exact collision counting, and
certificate search/verification for the linear isoperimetric bound.
"""

from .groups import BaseGroup, BaseElement, FPElement, fp_multiply
from .words import (
    TWord,
    is_conjugate,
    parse_word,
    format_word,
    substitute_back,
    tword_cyclic_reduce,
    tword_exponent_sum,
    tword_reduce,
)

__all__ = [
    "BaseGroup",
    "BaseElement",
    "FPElement",
    "TWord",
    "fp_multiply",
    "is_conjugate",
    "parse_word",
    "format_word",
    "substitute_back",
    "tword_cyclic_reduce",
    "tword_exponent_sum",
    "tword_reduce",
]
