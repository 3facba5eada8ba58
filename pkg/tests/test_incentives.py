import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from truthcoupling.errors import DomainError
from truthcoupling.incentives import (
    EffortSpec,
    LogFamily,
    PowerFamily,
    Regime,
    collapse_pressure,
    effort_curve,
    marginal_return,
    optimal_effort,
    solve_effort,
)

GRID = np.linspace(0.0, 1.0, 10_001)


def brute_force_effort(family, x):
    """Grid argmax of U(e) = f(e) + x (1 - e); the first maximizer on ties."""
    if isinstance(family, LogFamily):
        f = family.a * np.log1p(family.b * GRID)
    else:
        f = family.A * GRID**family.beta
    u = f + x * (1.0 - GRID)
    return GRID[int(np.argmax(u))], u


log_families = st.builds(LogFamily, st.floats(0.05, 20), st.floats(0.05, 20))
power_families = st.builds(PowerFamily, st.floats(0.05, 20), st.floats(0.05, 0.95))
families = st.one_of(log_families, power_families)


def test_marginal_return_examples():
    assert marginal_return(LogFamily(1, 1), 0) == 1
    assert marginal_return(LogFamily(1, 3), 1) == 0.75
    assert marginal_return(PowerFamily(1, 0.5), 0.25) == 1
    assert marginal_return(PowerFamily(1, 0.5), 0.0) == math.inf
    with pytest.raises(DomainError):
        marginal_return(LogFamily(1, 1), 1.5)


def test_family_validation():
    with pytest.raises(DomainError):
        LogFamily(0, 1)
    with pytest.raises(DomainError):
        PowerFamily(1, 1.0)
    with pytest.raises(DomainError):
        EffortSpec(LogFamily(1, 1), gamma=0, q=0.5)


def test_optimal_effort_examples():
    sol = optimal_effort(EffortSpec(LogFamily(1, 3), gamma=2, q=0.5))
    assert sol.regime is Regime.INTERIOR
    assert sol.e_star == pytest.approx(2 / 3, abs=1e-12)
    assert abs(sol.marginal_gap) <= 1e-9

    sol = optimal_effort(EffortSpec(LogFamily(1, 3), gamma=8, q=0.5))
    assert sol.regime is Regime.COLLAPSED_AT_ZERO and sol.e_star == 0.0

    for gamma in (0.1, 10, 1e6):
        sol = optimal_effort(EffortSpec(PowerFamily(1, 0.5), gamma=gamma, q=0.0))
        assert sol.regime is not Regime.COLLAPSED_AT_ZERO


def test_saturated_example_against_grid():
    family, spec = LogFamily(1, 1), EffortSpec(LogFamily(1, 1), gamma=1, q=0.5)
    e_grid, _ = brute_force_effort(family, spec.proxy_return)
    assert e_grid == 1.0
    sol = optimal_effort(spec)
    assert sol.regime is Regime.SATURATED_AT_ONE and sol.e_star == 1.0


def test_tie_at_threshold_collapses():
    sol = solve_effort(LogFamily(2, 1.5), 3.0)
    assert sol.regime is Regime.COLLAPSED_AT_ZERO


def test_collapse_pressure_examples():
    assert collapse_pressure(LogFamily(1, 1), 3) == pytest.approx(1.5)
    assert collapse_pressure(LogFamily(1, 1), 1) == math.inf
    assert collapse_pressure(PowerFamily(1, 0.5), 100) == math.inf
    # f'(0) / gamma = 21/22 places the threshold at 22
    assert collapse_pressure(LogFamily(21, 1), 22) == pytest.approx(22.0, rel=1e-12)
    assert collapse_pressure(LogFamily(10.5, 2), 22) == pytest.approx(22.0, rel=1e-12)


def test_collapse_pressure_is_where_effort_hits_zero():
    family, gamma = LogFamily(2, 1), 5.0
    lam = collapse_pressure(family, gamma)
    at = optimal_effort(EffortSpec(family, gamma, 1 / lam))
    below = optimal_effort(EffortSpec(family, gamma, 1 / (lam * 0.999)))
    assert at.regime is Regime.COLLAPSED_AT_ZERO
    assert below.e_star > 0


def test_effort_curve_examples():
    curve = effort_curve(LogFamily(1, 1), 2.0, np.linspace(0, 1, 201))
    xs = [x for x, _ in curve]
    assert xs == sorted(xs)
    for x, sol in curve:
        assert (sol.e_star == 0.0) == (x >= 1.0)
    assert curve[0][0] == 0.0 and curve[0][1].e_star == 1.0

    family = LogFamily(2, 1)
    for x, expected in ((1.0, 1.0), (1.5, 1 / 3), (2.0, 0.0)):
        e_grid, _ = brute_force_effort(family, x)
        assert e_grid == pytest.approx(expected, abs=1e-4)
        assert solve_effort(family, x).e_star == pytest.approx(expected, abs=1e-12)


def test_monotone_in_proxy_return():
    for family in (LogFamily(2, 3), PowerFamily(1.5, 0.4)):
        xs = np.linspace(0, 8, 1000)
        e = [solve_effort(family, x).e_star for x in xs]
        assert np.all(np.diff(e) <= 0)


@given(families, st.floats(0.01, 50), st.floats(0.0, 1.0))
def test_beats_brute_force_grid(family, gamma, q):
    spec = EffortSpec(family, gamma, q)
    sol = optimal_effort(spec)
    _, u = brute_force_effort(family, spec.proxy_return)
    assert spec.utility(sol.e_star) >= u.max() - 1e-9
    if sol.regime is Regime.INTERIOR:
        assert abs(sol.marginal_gap) <= 1e-9
    elif sol.regime is Regime.COLLAPSED_AT_ZERO:
        assert sol.e_star == 0.0
    else:
        assert sol.e_star == 1.0


@given(log_families, st.floats(0.01, 50), st.floats(0.0, 1.0))
def test_collapse_exactness(family, gamma, q):
    spec = EffortSpec(family, gamma, q)
    collapsed = optimal_effort(spec).regime is Regime.COLLAPSED_AT_ZERO
    assert collapsed == (spec.proxy_return >= family.a * family.b)


@given(families)
def test_marginal_strictly_decreasing(family):
    e = np.linspace(1e-3, 1.0, 200)
    m = [family.marginal(float(v)) for v in e]
    assert np.all(np.diff(m) < 0)
    assert all(v > 0 for v in m)
