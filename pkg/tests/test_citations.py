import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from truthcoupling.citations import (
    FieldProfile,
    binned_inflation,
    citation_coupling,
    conditional_value_normalized,
    conditional_value_raw,
    exchange_rate,
    marginal_value_per_citation,
    regression_slope_check,
    top_cited_selection_check,
)
from truthcoupling.errors import DomainError
from truthcoupling.montecarlo import draw_citation_pairs, top_of_n_selection

FIELD_A = FieldProfile("A", q=0.1, r_c=100.0, s=5.0)
FIELD_B = FieldProfile("B", q=0.5, r_c=5.0, s=1.0)

profiles = st.builds(
    FieldProfile,
    st.just("f"),
    st.floats(0.0, 1.0),
    st.floats(0.0, 1e3),
    st.floats(1e-2, 1e3),
    st.floats(0.0, 1e3),
)


def test_illustrative_profiles():
    assert FIELD_A.K == pytest.approx(81.0, abs=1e-12)
    assert FIELD_B.K == 1.25
    assert citation_coupling(FIELD_A) == pytest.approx(1 / math.sqrt(82), abs=1e-12)
    assert citation_coupling(FIELD_B) == pytest.approx(2 / 3, abs=1e-12)
    assert citation_coupling(FieldProfile("V", 1.0, 1e6)) == 1.0


def test_profile_validation():
    with pytest.raises(DomainError):
        FieldProfile("x", 1.2, 1.0)
    with pytest.raises(DomainError):
        FieldProfile("x", 0.5, -1.0)
    with pytest.raises(DomainError):
        FieldProfile("x", 0.5, 1.0, s=0.0)


def test_conditional_value_examples():
    perfect = conditional_value_normalized(FieldProfile("p", 1.0, 3.0), 2.5, var_t=4.0)
    assert (perfect.mean, perfect.variance, perfect.inflation) == (2.5, 0.0, 0.0)
    cv = conditional_value_normalized(FIELD_B, 9.0, var_t=1.0)
    assert cv.mean == pytest.approx(4.0, abs=1e-12)
    assert cv.inflation == pytest.approx(5.0, abs=1e-12)
    assert cv.variance == pytest.approx(5 / 9, abs=1e-12)


def test_conditional_value_raw_examples():
    f = FieldProfile("B", q=0.5, r_c=5.0, s=2.0, mu=10.0)
    assert conditional_value_raw(f, 10.0).mean == 0.0
    assert conditional_value_raw(f, 28.0).mean == pytest.approx(4.0, abs=1e-12)


def test_regression_slope_matches_shrinkage():
    check = regression_slope_check(FIELD_B, 1_000_000, seed=2)
    assert check.slope == pytest.approx(4 / 9, abs=0.005)


def test_raw_citation_bins_track_conditional_mean():
    f = FieldProfile("B", q=0.5, r_c=5.0, s=3.0, mu=20.0)
    rng = np.random.default_rng(8)
    t, c = draw_citation_pairs(f.q, f.r_c, 1_000_000, rng)
    y = f.mu + f.s * c
    edges = np.quantile(y, np.linspace(0, 1, 21))
    which = np.clip(np.searchsorted(edges, y, side="right") - 1, 0, 19)
    for k in range(20):
        mask = which == k
        predicted = np.mean([conditional_value_raw(f, v).mean for v in (y[mask].mean(),)])
        se = t[mask].std(ddof=1) / math.sqrt(mask.sum())
        assert abs(t[mask].mean() - predicted) <= 4 * se


def test_marginal_value_and_exchange_rate():
    assert marginal_value_per_citation(FieldProfile("b", 0.5, 5.0, s=1.0)) == pytest.approx(4 / 9)
    assert marginal_value_per_citation(FieldProfile("v", 1.0, 5.0, s=1.0)) == 1.0
    f1, f2 = FieldProfile("a", 0.3, 2.0, s=1.5), FieldProfile("a", 0.3, 2.0, s=3.0)
    assert marginal_value_per_citation(f2) == pytest.approx(marginal_value_per_citation(f1) / 2)
    assert exchange_rate(FIELD_A, FIELD_B) == pytest.approx(1640 / 9, abs=1e-9)
    assert exchange_rate(FIELD_B, FIELD_B) == 1.0
    kappa_ratio = marginal_value_per_citation(FIELD_B) / marginal_value_per_citation(FIELD_A)
    assert exchange_rate(FIELD_A, FIELD_B) == pytest.approx(kappa_ratio, rel=1e-12)


@given(profiles, st.floats(-1e3, 1e3), st.floats(1e-3, 1e3))
def test_mean_plus_inflation_is_score(f, c, var_t):
    cv = conditional_value_normalized(f, c, var_t)
    assert cv.mean + cv.inflation == pytest.approx(c, rel=1e-14, abs=1e-12)
    assert cv.variance >= 0.0
    assert cv.mean == pytest.approx(f.rho_c**2 * c, rel=1e-12, abs=1e-12)


@given(profiles, profiles, profiles)
def test_exchange_rate_transitive_and_reciprocal(a, b, c):
    assert exchange_rate(a, b) * exchange_rate(b, a) == pytest.approx(1.0, rel=1e-12)
    assert exchange_rate(a, c) == pytest.approx(exchange_rate(a, b) * exchange_rate(b, c), rel=1e-12)


def test_selection_with_perfect_coupling():
    check = top_cited_selection_check(FieldProfile("v", 1.0, 4.0), 10, 10_000, seed=1)
    assert check.slope == pytest.approx(1.0, abs=1e-12)
    assert check.fit.residual_sd < 1e-12


def test_selection_slope_for_top_of_50():
    check = top_cited_selection_check(FIELD_B, 50, 1_000_000, seed=3)
    assert check.slope == pytest.approx(4 / 9, abs=0.01)


def test_winner_inflation_tracks_line():
    t, c = top_of_n_selection(FIELD_B.q, FIELD_B.r_c, 20, 200_000, seed=4)
    for c_mean, infl, se, _ in binned_inflation(c, t, n_bins=10):
        expected = conditional_value_normalized(FIELD_B, c_mean).inflation
        assert abs(infl - expected) <= 4 * se


def test_selection_input_validation():
    with pytest.raises(DomainError):
        top_cited_selection_check(FIELD_B, 1, 10_000, seed=0)
    with pytest.raises(DomainError):
        top_cited_selection_check(FIELD_B, 5, 100, seed=0)
