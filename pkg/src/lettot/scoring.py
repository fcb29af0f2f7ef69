"""Composite response score: coverage breadth x depth x information efficiency.

S_total = (alpha * S_base + beta * S_specific) * F_eff, where F_eff is a
logistic transform of the element density N/L. The reported score is
rounded half-up to two decimals; statistics always use the raw value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from lettot.matcher import CoverageResult


class ScoringError(Exception):
    pass


@dataclass(frozen=True)
class ScoreWeights:
    alpha: float = 1.0
    beta: float = 1.0
    # density scale inside the logistic; 1.0 reproduces the plain N/L form.
    # calibrate_kappa() documents how to pick another value.
    kappa: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0:
            raise ScoringError("alpha and beta must be nonnegative")
        if self.alpha == 0 and self.beta == 0:
            raise ScoringError("alpha and beta cannot both be zero")
        if not self.kappa > 0:
            raise ScoringError("kappa must be positive")


@dataclass(frozen=True)
class ScoreBreakdown:
    s_base: int
    s_specific: int
    n: int
    length: int
    f_eff: float
    s_total_raw: float
    s_total: float  # rounded half-up to 2 decimals


def base_score(coverage: CoverageResult) -> int:
    """Sum of the per-category general coverage scores."""
    return sum(coverage.c_scores.values())


def specific_score(coverage: CoverageResult) -> int:
    """Sum of the theme-specific element scores."""
    return sum(coverage.s_scores.values())


def efficiency_factor(n: int, length: int, kappa: float = 1.0) -> float:
    """Logistic of the element density: 1 / (1 + exp(-kappa * n / length))."""
    if length < 1:
        raise ScoringError(f"text length must be >= 1, got {length}")
    if n < 0:
        raise ScoringError(f"element count must be >= 0, got {n}")
    return 1.0 / (1.0 + math.exp(-kappa * n / length))


def round_half_up(value: float, places: int = 2) -> float:
    q = Decimal(10) ** -places
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


def total_score(
    coverage: CoverageResult, length: int, weights: ScoreWeights = ScoreWeights()
) -> ScoreBreakdown:
    """Combine coverage and efficiency into the composite score."""
    s_base = base_score(coverage)
    s_spec = specific_score(coverage)
    n = coverage.n
    f_eff = efficiency_factor(n, length, weights.kappa)
    raw = (weights.alpha * s_base + weights.beta * s_spec) * f_eff
    return ScoreBreakdown(
        s_base=s_base,
        s_specific=s_spec,
        n=n,
        length=length,
        f_eff=f_eff,
        s_total_raw=raw,
        s_total=round_half_up(raw),
    )


def calibrate_kappa(median_density: float, target: float = 1.0) -> float:
    """Choose kappa so the corpus-median density maps to logistic(target).

    With target=1 the median response lands at F_eff ~= 0.73, which spreads
    scores instead of compressing them into a sliver above 0.5.
    """
    if median_density <= 0:
        raise ScoringError("median density must be positive")
    return target / median_density
