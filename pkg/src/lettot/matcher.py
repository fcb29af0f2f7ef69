"""Detect which framework elements a response covers.

Matching is lexicon-based and deterministic: case-insensitive substring
search on Unicode-normalized text, each pattern counted at most once per
element. A general element scores 2 instead of 1 when one of its matches
shares a sentence with a quantitative detail (number, currency, time, or
duration token); that is the operational proxy for "substantive" coverage.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

from lettot.framework import CATEGORY_MAX, ElementFramework, QueryType

# sentence boundaries: western + CJK terminators and newlines
_SENTENCE_RE = re.compile(r"[.!?。！？\n]")

# numbers (incl. times like 9:30), currency symbols/codes, duration words
_QUANT_RE = re.compile(
    r"\d"
    r"|[$£€¥₹]"
    r"|\b(?:usd|eur|gbp|cny|rmb|jpy)\b"
    r"|\b(?:day|days|hour|hours|minute|minutes|week|weeks|night|nights|month|months)\b",
    re.IGNORECASE,
)


class MatcherError(Exception):
    pass


@dataclass
class CoverageResult:
    """Per-category and per-specific-element coverage of one response text."""

    c_scores: dict[str, int]  # QueryType value -> [0, 12]
    s_scores: dict[str, int]  # specific element id -> [0, 4]
    matched_spans: list[tuple[str, str, int]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return sum(self.c_scores.values()) + sum(self.s_scores.values())


def _normalize(text: str) -> str:
    return unicodedata.normalize("NFC", text).casefold()


def _sentence_bounds(text: str) -> list[tuple[int, int]]:
    bounds = []
    start = 0
    for m in _SENTENCE_RE.finditer(text):
        bounds.append((start, m.start()))
        start = m.end()
    bounds.append((start, len(text)))
    return bounds


def _sentence_for(bounds: list[tuple[int, int]], offset: int) -> tuple[int, int]:
    for lo, hi in bounds:
        if lo <= offset <= hi:
            return lo, hi
    return bounds[-1]


def match_elements(text: str, framework: ElementFramework, theme: str) -> CoverageResult:
    """Score every general element (all three categories) and the theme's sub-elements."""
    if theme not in framework.theme_ids():
        raise MatcherError(f"unknown theme: {theme!r}")

    norm = _normalize(text)
    bounds = _sentence_bounds(norm)
    spans: list[tuple[str, str, int]] = []

    c_scores = {qt.value: 0 for qt in QueryType}
    for elem in framework.general_elements:
        hits: list[tuple[str, int]] = []
        for pattern in elem.lexicon:
            pos = norm.find(_normalize(pattern))
            if pos >= 0:
                hits.append((pattern, pos))
        if not hits:
            continue
        score = 1
        for pattern, pos in hits:
            lo, hi = _sentence_for(bounds, pos)
            if _QUANT_RE.search(norm, lo, hi):
                score = 2
                break
        c_scores[elem.category.value] = min(
            CATEGORY_MAX, c_scores[elem.category.value] + min(score, elem.max_points)
        )
        spans.extend((elem.id, pattern, pos) for pattern, pos in hits)

    s_scores: dict[str, int] = {}
    for elem in framework.specific_for(theme):
        total = 0
        for sub in elem.sub_elements:
            hits = []
            for pattern in sub.lexicon:
                pos = norm.find(_normalize(pattern))
                if pos >= 0:
                    hits.append((pattern, pos))
            if hits:
                total += 1
                spans.extend((elem.id, pattern, pos) for pattern, pos in hits)
        s_scores[elem.id] = total

    return CoverageResult(c_scores=c_scores, s_scores=s_scores, matched_spans=spans)


def explain_coverage(result: CoverageResult, framework: ElementFramework) -> str:
    """Human-readable audit of a CoverageResult: every element, its score, its evidence."""
    by_elem: dict[str, list[tuple[str, int]]] = {}
    for eid, pattern, off in result.matched_spans:
        by_elem.setdefault(eid, []).append((pattern, off))

    lines = []
    for qt in QueryType:
        lines.append(f"[{qt.value}] category score {result.c_scores[qt.value]}")
        for elem in framework.general_for(qt):
            hits = by_elem.get(elem.id, [])
            if hits:
                ev = "; ".join(f"{p!r}@{o}" for p, o in hits)
                lines.append(f"  {elem.name}: matched ({ev})")
            else:
                lines.append(f"  {elem.name}: 0")
    for eid in sorted(result.s_scores):
        score = result.s_scores[eid]
        lines.append(f"[specific] {eid}: {score}/4")
        for p, o in by_elem.get(eid, []):
            lines.append(f"  evidence {p!r}@{o}")
    lines.append(f"total elements covered N = {result.n}")
    return "\n".join(lines)
