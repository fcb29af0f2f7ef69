"""Edit-distance frontend.

Prefers the compiled kernel when the extension built; falls back to the
pure-Python implementation with identical results. `BACKEND` reports
which one was selected.
"""
from __future__ import annotations

try:
    from lettot._editdist import levenshtein as _levenshtein

    BACKEND = "cython"
except ImportError:  # extension not built on this platform
    from lettot._editdist_py import levenshtein as _levenshtein

    BACKEND = "python"


def levenshtein(a: str, b: str) -> int:
    """Edit distance over Unicode scalar values (insert/delete/substitute, unit costs)."""
    return _levenshtein(a, b)


def similarity(a: str, b: str) -> float:
    """Normalized similarity: 1 - distance / max length. Two empty strings compare as 1."""
    m = max(len(a), len(b))
    if m == 0:
        return 1.0
    return 1.0 - _levenshtein(a, b) / m
