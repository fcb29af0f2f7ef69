import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lettot.matcher import CoverageResult
from lettot.scoring import (
    ScoreWeights,
    ScoringError,
    base_score,
    calibrate_kappa,
    efficiency_factor,
    round_half_up,
    specific_score,
    total_score,
)

from oracles import composite_score_one_expression


def cov(cp=0, cc=0, cg=0, s=()):
    return CoverageResult(
        c_scores={"Planning": cp, "Consulting": cc, "Guiding": cg},
        s_scores={f"e{i}": v for i, v in enumerate(s)},
    )


class TestBaseScore:
    def test_maximum(self):
        assert base_score(cov(12, 12, 12)) == 36

    def test_zero(self):
        assert base_score(cov(0, 0, 0)) == 0

    def test_arithmetic(self):
        assert base_score(cov(4, 7, 1)) == 12


class TestEfficiencyFactor:
    def test_logistic_at_zero(self):
        assert efficiency_factor(0, 500) == 0.5

    def test_typical_density(self):
        # direct high-precision evaluation of 1/(1+exp(-12/1200))
        assert efficiency_factor(12, 1200) == pytest.approx(0.5024999791668750, abs=1e-15)

    def test_saturation(self):
        assert efficiency_factor(10, 1) == pytest.approx(0.9999546021312976, abs=1e-12)

    def test_zero_length_rejected(self):
        with pytest.raises(ScoringError):
            efficiency_factor(5, 0)

    def test_monotone_in_n(self):
        vals = [efficiency_factor(n, 800) for n in range(0, 49)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_antitone_in_length(self):
        vals = [efficiency_factor(10, length) for length in (50, 100, 500, 2000)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


class TestTotalScore:
    def test_arithmetic(self):
        # S_base 10, S_specific 5, F_eff forced ~0.6 via direct formula check
        c = cov(4, 4, 2, (3, 2))
        br = total_score(c, length=100)
        expected = 15 * efficiency_factor(15, 100)
        assert br.s_total_raw == pytest.approx(expected, rel=1e-15)

    def test_beta_zero_ignores_specific(self):
        c1 = cov(4, 4, 2, (3, 2))
        c2 = cov(4, 4, 2, (0, 0))
        w = ScoreWeights(alpha=1.0, beta=0.0)
        b1 = total_score(c1, 100, w)
        b2 = total_score(c2, 100, w)
        # weighted sum identical; only the density term differs
        assert b1.s_total_raw / b1.f_eff == pytest.approx(b2.s_total_raw / b2.f_eff)

    def test_rounding_half_up(self):
        assert round_half_up(9.005) == 9.01
        assert round_half_up(9.004999) == 9.00
        assert round_half_up(-1.005) == -1.01

    def test_invalid_weights(self):
        with pytest.raises(ScoringError):
            ScoreWeights(alpha=0.0, beta=0.0)
        with pytest.raises(ScoringError):
            ScoreWeights(kappa=0.0)
        with pytest.raises(ScoringError):
            ScoreWeights(alpha=-1.0)

    def test_matches_one_expression_oracle(self):
        rng = random.Random(99)
        for _ in range(500):
            c = cov(rng.randint(0, 12), rng.randint(0, 12), rng.randint(0, 12),
                    tuple(rng.randint(0, 4) for _ in range(3)))
            length = rng.randint(1, 5000)
            br = total_score(c, length)
            expected = composite_score_one_expression(c.c_scores, c.s_scores, length)
            assert br.s_total_raw == pytest.approx(expected, rel=1e-12)

    def test_extra_sub_element_strictly_increases(self):
        c1 = cov(6, 2, 4, (1, 2, 0))
        c2 = cov(6, 2, 4, (1, 2, 1))
        assert total_score(c2, 900).s_total_raw > total_score(c1, 900).s_total_raw

    def test_longer_text_strictly_decreases(self):
        c = cov(6, 2, 4, (1, 2, 0))
        assert total_score(c, 1000).s_total_raw < total_score(c, 500).s_total_raw

    @given(st.integers(0, 12), st.integers(0, 12), st.integers(0, 12),
           st.integers(1, 10_000))
    def test_f_eff_band(self, cp, cc, cg, length):
        br = total_score(cov(cp, cc, cg), length)
        assert 0.5 <= br.f_eff < 1.0
        assert (br.f_eff == 0.5) == (br.n == 0)


def test_calibrate_kappa():
    k = calibrate_kappa(0.01)
    assert efficiency_factor(1, 100, kappa=k) == pytest.approx(1 / (1 + math.exp(-1)))
    with pytest.raises(ScoringError):
        calibrate_kappa(0.0)
