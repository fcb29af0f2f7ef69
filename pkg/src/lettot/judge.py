"""Cross-validating judging: direct 1-7 Likert aggregation and AHP pairwise weighting.

AHP follows the standard recipe: positive reciprocal comparison matrix,
principal eigenvector by power iteration, consistency ratio gate at 0.1.
The random-index constants are not hard-coded folklore values; they are
estimated once per matrix size by simulating random reciprocal matrices
drawn from the 1-9 intensity scale (see random_index).
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from lettot.framework import RUBRIC_DIMENSION_IDS
from lettot.scoring import round_half_up

ANNOTATOR_PASSES = 3
CR_ACCEPT = 0.1

# Saaty 1-9 intensity scale and reciprocals, used for RI simulation
_SAATY_SCALE = [1 / k for k in range(9, 1, -1)] + [float(k) for k in range(1, 10)]


class JudgeError(Exception):
    pass


def validate_scores(scores: dict[str, int]) -> dict[str, int]:
    """Check a 7-dimension Likert score map; returns it unchanged if valid."""
    for dim in RUBRIC_DIMENSION_IDS:
        if dim not in scores:
            raise JudgeError(f"missing dimension: {dim}")
        v = scores[dim]
        if not isinstance(v, int) or isinstance(v, bool) or not 1 <= v <= 7:
            raise JudgeError(f"dimension {dim} score {v!r} outside 1-7")
    extra = set(scores) - set(RUBRIC_DIMENSION_IDS)
    if extra:
        raise JudgeError(f"unknown dimensions: {sorted(extra)}")
    return scores


@dataclass
class JudgeVerdict:
    response_ref: str
    passes: list[dict[str, int]]
    aggregated: dict[str, float] = field(default_factory=dict)
    ranges: dict[str, int] = field(default_factory=dict)


def aggregate_direct(response_ref: str, passes: list[dict[str, int]]) -> JudgeVerdict:
    """Mean of three annotator passes per dimension, plus max-min disagreement ranges."""
    if len(passes) != ANNOTATOR_PASSES:
        raise JudgeError(f"expected {ANNOTATOR_PASSES} passes, got {len(passes)}")
    for p in passes:
        validate_scores(p)
    aggregated = {}
    ranges = {}
    for dim in RUBRIC_DIMENSION_IDS:
        vals = [p[dim] for p in passes]
        aggregated[dim] = sum(vals) / len(vals)
        ranges[dim] = max(vals) - min(vals)
    return JudgeVerdict(response_ref, passes, aggregated, ranges)


def relative_gain(base_mean: float, opt_mean: float) -> float:
    """Percentage improvement of optimized over baseline, to two decimals."""
    if base_mean <= 0:
        raise JudgeError(f"baseline mean must be positive, got {base_mean}")
    return round_half_up(100.0 * (opt_mean - base_mean) / base_mean)


@dataclass
class AhpMatrix:
    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        a = np.asarray(self.values, dtype=float)
        n = a.shape[0]
        if a.ndim != 2 or a.shape[1] != n or n < 2:
            raise JudgeError(f"comparison matrix must be square with n >= 2, got {a.shape}")
        if len(self.labels) != n:
            raise JudgeError("label count does not match matrix size")
        if not np.all(a > 0):
            raise JudgeError("comparison matrix entries must be positive")
        if not np.allclose(np.diag(a), 1.0, atol=1e-12):
            raise JudgeError("comparison matrix diagonal must be 1")
        if not np.allclose(a * a.T, 1.0, atol=1e-12):
            raise JudgeError("comparison matrix is not reciprocal")
        self.values = a

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class AhpResult:
    weights: np.ndarray
    labels: tuple[str, ...]
    lambda_max: float
    ci: float
    cr: float
    accepted: bool


def _power_iteration(a: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    n = a.shape[0]
    w = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = a @ w
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - w)) <= tol * np.max(np.abs(nxt)):
            return nxt
        w = nxt
    raise JudgeError(f"power iteration did not converge in {max_iter} iterations")


@functools.lru_cache(maxsize=None)
def random_index(n: int, samples: int = 10_000, seed: int = 1848) -> float:
    """Mean consistency index of random reciprocal matrices of size n.

    Entries above the diagonal are drawn uniformly from the 1-9 scale and
    its reciprocals; lambda_max comes from a fixed-length batched power
    iteration. Cached per (n, samples, seed).
    """
    if n < 2:
        raise JudgeError("random index defined for n >= 2")
    if n == 2:
        return 0.0  # 2x2 reciprocal matrices are always consistent
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    mats = np.ones((samples, n, n))
    draws = rng.choice(_SAATY_SCALE, size=(samples, len(iu[0])))
    mats[:, iu[0], iu[1]] = draws
    mats[:, iu[1], iu[0]] = 1.0 / draws

    w = np.full((samples, n), 1.0 / n)
    for _ in range(200):
        w = np.einsum("sij,sj->si", mats, w)
        w /= w.sum(axis=1, keepdims=True)
    aw = np.einsum("sij,sj->si", mats, w)
    lam = np.einsum("si,si->s", w, aw) / np.einsum("si,si->s", w, w)
    ci = (lam - n) / (n - 1)
    return float(ci.mean())


def priority_vector(matrix: AhpMatrix, tol: float = 1e-10) -> AhpResult:
    """Principal-eigenvector weights with consistency diagnostics."""
    a = matrix.values
    n = matrix.n
    w = _power_iteration(a, tol=tol)
    aw = a @ w
    lambda_max = float(w @ aw / (w @ w))
    ci = (lambda_max - n) / (n - 1)
    ri = random_index(n)
    cr = 0.0 if ri == 0.0 else ci / ri
    return AhpResult(
        weights=w,
        labels=matrix.labels,
        lambda_max=lambda_max,
        ci=ci,
        cr=cr,
        accepted=cr < CR_ACCEPT,
    )


@dataclass
class AhpComparison:
    models: list[str]
    dimension_means: dict[str, dict[str, tuple[float, float]]]  # model -> dim -> (S, O)
    weighted: dict[str, tuple[float, float]]  # model -> (S, O) weighted composite
    dimension_ranks: dict[str, dict[str, tuple[int, int]]]  # model -> dim -> (S, O)
    overall_rank: dict[str, tuple[int, int]]  # model -> (S, O)


def _rank(values: dict[str, float]) -> dict[str, int]:
    """1 = best; ties broken lexicographically for determinism."""
    order = sorted(values, key=lambda m: (-values[m], m))
    return {m: i + 1 for i, m in enumerate(order)}


def ahp_compare(
    base_verdicts: dict[str, list[JudgeVerdict]],
    opt_verdicts: dict[str, list[JudgeVerdict]],
    weights: AhpResult,
    override: bool = False,
) -> AhpComparison:
    """Weighted dimension scores and rankings for baseline (S) vs optimized (O) verdicts."""
    if not weights.accepted and not override:
        raise JudgeError(
            f"dimension weights rejected (CR = {weights.cr:.4f} >= {CR_ACCEPT}); "
            "pass override to proceed"
        )
    if tuple(weights.labels) != RUBRIC_DIMENSION_IDS:
        raise JudgeError("weights labels must be the seven rubric dimensions")
    models = sorted(base_verdicts)
    if sorted(opt_verdicts) != models:
        missing = sorted(set(base_verdicts) ^ set(opt_verdicts))
        raise JudgeError(f"model sets differ between variants: {missing}")

    wmap = dict(zip(weights.labels, weights.weights))
    dim_means: dict[str, dict[str, tuple[float, float]]] = {}
    weighted: dict[str, tuple[float, float]] = {}
    for model in models:
        dim_means[model] = {}
        s_comp = o_comp = 0.0
        for dim in RUBRIC_DIMENSION_IDS:
            s_vals = [v.aggregated[dim] for v in base_verdicts[model]]
            o_vals = [v.aggregated[dim] for v in opt_verdicts[model]]
            if not s_vals or not o_vals:
                raise JudgeError(f"model {model} has no verdicts for {dim}")
            s_mean = sum(s_vals) / len(s_vals)
            o_mean = sum(o_vals) / len(o_vals)
            dim_means[model][dim] = (s_mean, o_mean)
            s_comp += wmap[dim] * s_mean
            o_comp += wmap[dim] * o_mean
        weighted[model] = (s_comp, o_comp)

    dim_ranks: dict[str, dict[str, tuple[int, int]]] = {m: {} for m in models}
    for dim in RUBRIC_DIMENSION_IDS:
        s_rank = _rank({m: dim_means[m][dim][0] for m in models})
        o_rank = _rank({m: dim_means[m][dim][1] for m in models})
        for m in models:
            dim_ranks[m][dim] = (s_rank[m], o_rank[m])
    s_overall = _rank({m: weighted[m][0] for m in models})
    o_overall = _rank({m: weighted[m][1] for m in models})
    overall = {m: (s_overall[m], o_overall[m]) for m in models}

    return AhpComparison(
        models=models,
        dimension_means=dim_means,
        weighted=weighted,
        dimension_ranks=dim_ranks,
        overall_rank=overall,
    )
