import random

import pytest

from lettot.matcher import CoverageResult, MatcherError, explain_coverage, match_elements


def naive_scan(text, framework, theme):
    """Independent full-scan check: substring search per pattern, no structure sharing."""
    norm = text.casefold()
    c = {}
    for qt in ("Planning", "Consulting", "Guiding"):
        c[qt] = 0
    for elem in framework.general_elements:
        if any(p.casefold() in norm for p in elem.lexicon):
            c[elem.category.value] += 1  # mention-level only
    s = {}
    for elem in framework.specific_for(theme):
        s[elem.id] = sum(
            1 for sub in elem.sub_elements if any(p.casefold() in norm for p in sub.lexicon)
        )
    return c, s


def test_budget_with_currency_scores_two(framework):
    cov = match_elements("Allocate a £1900 budget across 3 days", framework, "cultural")
    assert cov.c_scores["Planning"] == 2
    assert any(eid == "planning.budget_management" for eid, _, _ in cov.matched_spans)


def test_mention_without_quantity_scores_one(framework):
    cov = match_elements("Think about your budget before you go", framework, "cultural")
    assert cov.c_scores["Planning"] == 1


def test_quantity_in_other_sentence_does_not_upgrade(framework):
    cov = match_elements("Think about the budget. Elsewhere there are 3 parks", framework,
                         "cultural")
    assert cov.c_scores["Planning"] == 1


def test_empty_text(framework):
    cov = match_elements("", framework, "nature")
    assert all(v == 0 for v in cov.c_scores.values())
    assert all(v == 0 for v in cov.s_scores.values())
    assert cov.n == 0 and cov.matched_spans == []


def test_unknown_theme(framework):
    with pytest.raises(MatcherError):
        match_elements("text", framework, "atlantis")


def test_planted_nature_sub_elements(framework):
    # plant exactly 7 sub-element phrases of the Nature theme
    subs = [s for e in framework.specific_for("nature") for s in e.sub_elements]
    phrases = [s.lexicon[0] for s in subs[:7]]
    text = ". ".join(f"We support {p}" for p in phrases)
    cov = match_elements(text, framework, "nature")
    assert sum(cov.s_scores.values()) == 7
    _, s_oracle = naive_scan(text, framework, "nature")
    assert cov.s_scores == s_oracle


def test_case_insensitive(framework):
    cov = match_elements("BUDGET planning for 3 DAYS", framework, "urban")
    assert cov.c_scores["Planning"] >= 2


def test_pattern_counted_once_per_element(framework):
    cov = match_elements("budget budget budget", framework, "cultural")
    assert cov.c_scores["Planning"] == 1


def test_monotone_under_append(framework):
    base = "Consider the budget. The route matters."
    extra = base + " Check the visa policy and take travel insurance."
    c1 = match_elements(base, framework, "island")
    c2 = match_elements(extra, framework, "island")
    for qt in c1.c_scores:
        assert c2.c_scores[qt] >= c1.c_scores[qt]
    for eid in c1.s_scores:
        assert c2.s_scores[eid] >= c1.s_scores[eid]


def test_deterministic_including_span_order(framework):
    text = "Plan the budget of 200, the route, and emergency support."
    a = match_elements(text, framework, "wellness")
    b = match_elements(text, framework, "wellness")
    assert a.c_scores == b.c_scores and a.s_scores == b.s_scores
    assert a.matched_spans == b.matched_spans


def test_bound_on_n(framework):
    # every general lexicon head + every sub-element of one theme, with numbers
    phrases = [e.lexicon[0] for e in framework.general_elements]
    phrases += [s.lexicon[0] for e in framework.specific_for("cultural")
                for s in e.sub_elements]
    text = ". ".join(f"{p} rated 10" for p in phrases)
    cov = match_elements(text, framework, "cultural")
    assert cov.n <= 48
    assert cov.n == 36 + 12  # saturated: 3 categories x 12 + 3 elements x 4


def test_agreement_with_naive_scan_corpus(framework):
    rng = random.Random(13)
    pool = [e.lexicon[0] for e in framework.general_elements]
    pool += [s.lexicon[0] for e in framework.specific_for("island") for s in e.sub_elements]
    pool += ["nothing here", "plain filler", "random words"]
    for _ in range(100):
        text = ". ".join(rng.choice(pool) for _ in range(rng.randint(0, 6)))
        cov = match_elements(text, framework, "island")
        c_oracle, s_oracle = naive_scan(text, framework, "island")
        # naive scan is mention-level; element scores must be >= it and <= 2x
        for qt, v in c_oracle.items():
            assert v <= cov.c_scores[qt] <= 2 * v
        assert cov.s_scores == s_oracle


class TestExplain:
    def test_zero_coverage(self, framework):
        cov = match_elements("nothing relevant at all", framework, "urban")
        report = explain_coverage(cov, framework)
        assert "N = 0" in report
        assert "evidence" not in report

    def test_contributing_elements_listed(self, framework):
        cov = match_elements("Mind the budget of 500 and the route", framework, "urban")
        report = explain_coverage(cov, framework)
        assert "Budget Management: matched" in report
        assert "Route Design: matched" in report
        assert "Safety System: 0" in report

    def test_total_restates_n(self, framework):
        rng = random.Random(5)
        pool = [e.lexicon[0] for e in framework.general_elements] + ["filler"]
        for _ in range(20):
            text = ". ".join(rng.choice(pool) for _ in range(rng.randint(0, 5)))
            cov = match_elements(text, framework, "cultural")
            assert f"N = {cov.n}" in explain_coverage(cov, framework)
