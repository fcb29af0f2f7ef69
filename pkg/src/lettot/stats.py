"""Descriptive statistics, Welch tests, p-value matrices, and model rankings.

Conventions are pinned so outputs are reproducible bit-exact: sample std
uses the n-1 denominator, quantiles use linear interpolation, CI95 uses
Student-t, and KDE uses a Gaussian kernel with Silverman bandwidth on a
256-point grid spanning [min - 3h, max + 3h].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats as sps

KDE_GRID_POINTS = 256


class StatsError(Exception):
    pass


@dataclass
class StatsSummary:
    model_id: str
    n: int
    mean: float
    std: float
    minimum: float
    maximum: float
    iqr: float
    ci95: tuple[float, float]
    kde: list[tuple[float, float]] = field(default_factory=list)


def summarize(scores: list[float], model_id: str = "") -> StatsSummary:
    if len(scores) < 2:
        raise StatsError(f"need at least 2 scores, got {len(scores)}")
    x = np.asarray(scores, dtype=float)
    n = len(x)
    mean = float(x.mean())
    std = float(x.std(ddof=1))
    q1, q3 = np.percentile(x, [25, 75])  # linear interpolation between closest ranks
    iqr = float(q3 - q1)

    tcrit = float(sps.t.ppf(0.975, n - 1))
    half = tcrit * std / math.sqrt(n)
    ci95 = (mean - half, mean + half)

    # Silverman bandwidth; fall back to a small positive width for
    # (near-)constant samples so the density still integrates to ~1.
    h = 0.9 * min(std, iqr / 1.34) * n ** (-0.2)
    if h <= 0:
        h = max(1e-3, 1e-3 * abs(mean))
    grid = np.linspace(x.min() - 3 * h, x.max() + 3 * h, KDE_GRID_POINTS)
    dens = np.exp(-0.5 * ((grid[:, None] - x[None, :]) / h) ** 2)
    dens = dens.sum(axis=1) / (n * h * math.sqrt(2 * math.pi))
    kde = list(zip(grid.tolist(), dens.tolist()))

    return StatsSummary(
        model_id=model_id,
        n=n,
        mean=mean,
        std=std,
        minimum=float(x.min()),
        maximum=float(x.max()),
        iqr=iqr,
        ci95=ci95,
        kde=kde,
    )


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p: float
    degenerate: bool = False


def welch_t_test(a: list[float], b: list[float], pooled: bool = False) -> TTestResult:
    """Two-sided two-sample t-test; Welch by default, pooled-variance behind the flag.

    Degenerate inputs are handled rather than raised: two constant equal
    samples give t = 0, p = 1; constant unequal samples give the p -> 0
    limit, flagged via `degenerate`.
    """
    if len(a) < 2 or len(b) < 2:
        raise StatsError("each sample needs at least 2 observations")
    xa = np.asarray(a, dtype=float)
    xb = np.asarray(b, dtype=float)
    na, nb = len(xa), len(xb)
    va = float(xa.var(ddof=1))
    vb = float(xb.var(ddof=1))
    diff = float(xa.mean() - xb.mean())

    if va == 0.0 and vb == 0.0:
        if diff == 0.0:
            return TTestResult(t=0.0, df=float(na + nb - 2), p=1.0, degenerate=True)
        return TTestResult(
            t=math.copysign(math.inf, diff), df=float(na + nb - 2), p=0.0, degenerate=True
        )

    if pooled:
        df = float(na + nb - 2)
        sp2 = ((na - 1) * va + (nb - 1) * vb) / df
        se = math.sqrt(sp2 * (1 / na + 1 / nb))
    else:
        sea, seb = va / na, vb / nb
        se = math.sqrt(sea + seb)
        df = (sea + seb) ** 2 / (sea**2 / (na - 1) + seb**2 / (nb - 1))

    t = diff / se
    # two-sided p via the regularized incomplete beta function
    p = float(special.betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TTestResult(t=t, df=df, p=p)


@dataclass
class PValueMatrix:
    models: list[str]
    values: np.ndarray  # symmetric, diagonal 1, NaN where a cell failed
    missing: list[tuple[str, str, str]] = field(default_factory=list)  # (a, b, reason)


def pvalue_matrix(score_groups: dict[str, list[float]], pooled: bool = False) -> PValueMatrix:
    models = sorted(score_groups)
    if len(models) < 2:
        raise StatsError("need at least 2 models for a p-value matrix")
    k = len(models)
    mat = np.ones((k, k))
    missing: list[tuple[str, str, str]] = []
    for i in range(k):
        for j in range(i + 1, k):
            try:
                res = welch_t_test(score_groups[models[i]], score_groups[models[j]], pooled)
                mat[i, j] = mat[j, i] = res.p
            except StatsError as exc:
                mat[i, j] = mat[j, i] = math.nan
                missing.append((models[i], models[j], str(exc)))
    return PValueMatrix(models=models, values=mat, missing=missing)


def rank_models(summaries: list[StatsSummary]) -> list[tuple[int, StatsSummary]]:
    """Rank 1 = highest mean; ties by lower std, then model id."""
    if not summaries:
        raise StatsError("no summaries to rank")
    ordered = sorted(summaries, key=lambda s: (-s.mean, s.std, s.model_id))
    return [(i + 1, s) for i, s in enumerate(ordered)]
