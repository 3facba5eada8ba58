import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from truthcoupling.analytic import (
    MixingMode,
    ModelParams,
    PressureInputs,
    bandwidth_requirement,
    contour_ratio,
    coupling_budget,
    effective_cost,
    truth_coupling,
    verification_pressure,
    verification_rate,
)
from truthcoupling.errors import DomainError

LIN = MixingMode.LINEAR_SHRINKAGE
BER = MixingMode.BERNOULLI_MIXTURE

rates = st.floats(0.0, 1.0)
ratios = st.floats(0.0, 1e4)
positive = st.floats(1e-3, 1e3)


def test_effective_cost():
    assert effective_cost(10, 0.5) == 20
    assert effective_cost(7, 1) == 7
    for kappa in (0.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            effective_cost(10, kappa)
    with pytest.raises(DomainError):
        effective_cost(0, 0.5)


@pytest.mark.parametrize(
    "R, c, kappa, B, expected",
    [(100, 1, 0.5, 50, 4.0), (10, 1, 1, 20, 0.5), (22, 1, 1, 1, 22.0)],
)
def test_verification_pressure(R, c, kappa, B, expected):
    p = PressureInputs(claim_rate=R, raw_cost=c, fidelity=kappa, bandwidth=B)
    assert verification_pressure(p) == pytest.approx(expected, rel=1e-15)
    assert p.pressure == p.claim_rate * p.effective_cost / p.bandwidth


def test_pressure_inputs_reject_bad_values():
    with pytest.raises(DomainError):
        PressureInputs(claim_rate=0, raw_cost=1, fidelity=1, bandwidth=1)
    with pytest.raises(DomainError):
        PressureInputs(claim_rate=1, raw_cost=1, fidelity=0, bandwidth=1)
    with pytest.raises(DomainError):
        PressureInputs(claim_rate=1, raw_cost=1, fidelity=1, bandwidth=-2)


def test_verification_rate():
    assert verification_rate(0.5) == 1.0
    assert verification_rate(4) == 0.25
    assert verification_rate(1) == 1.0
    for bad in (0.0, -1.0, math.nan):
        with pytest.raises(DomainError):
            verification_rate(bad)


def test_truth_coupling_examples():
    assert truth_coupling(1, 50, LIN) == 1.0
    assert truth_coupling(1, 50, BER) == 1.0
    assert truth_coupling(0.5, 5, LIN) == pytest.approx(2 / 3, abs=1e-12)
    assert truth_coupling(0.1, 100, LIN) == pytest.approx(1 / math.sqrt(82), abs=1e-12)
    assert truth_coupling(0.5, 5, BER) == pytest.approx(3.5**-0.5, abs=1e-12)
    assert truth_coupling(0.5, 5, "bernoulli") == truth_coupling(0.5, 5, BER)
    with pytest.raises(DomainError):
        truth_coupling(0.5, -1)
    with pytest.raises(DomainError):
        truth_coupling(1.5, 1)


def test_bernoulli_formula_matches_literal_coin_flip():
    # independent sampler: per-paper coin, score is T or T + Delta
    rng = np.random.default_rng(20240601)
    n, q, r = 1_000_000, 0.5, 5.0
    t = rng.standard_normal(n)
    proxy = t + math.sqrt(r) * rng.standard_normal(n)
    s = np.where(rng.uniform(size=n) < q, t, proxy)
    rho = np.corrcoef(s, t)[0, 1]
    se = (1 - rho**2) / math.sqrt(n) * 2  # generous: S is non-Gaussian
    assert abs(rho - truth_coupling(q, r, BER)) < 4 * se


def test_coupling_budget_examples():
    assert coupling_budget(0.5, 12) == pytest.approx(0.5, abs=1e-15)
    assert coupling_budget(0.5, 3) == 0.0
    assert coupling_budget(0.5, 1) == 0.0
    assert truth_coupling(0.0, 1.0) == pytest.approx(1 / math.sqrt(2))
    assert truth_coupling(0.0, 1.0) >= 0.5
    for rho, r in ((0.0, 1.0), (1.0, 1.0), (0.5, 0.0)):
        with pytest.raises(DomainError):
            coupling_budget(rho, r)


def test_bandwidth_requirement():
    assert bandwidth_requirement(0.5, 100, 2) == 100
    assert bandwidth_requirement(0.0, 123.4, 5.6) == 0
    assert bandwidth_requirement(1.0, 10, 3) == 30
    with pytest.raises(DomainError):
        bandwidth_requirement(1.2, 10, 3)


def test_model_params():
    m = ModelParams(var_t=2.0, var_delta=8.0, q=0.5)
    assert m.r == 4.0
    assert m.coupling() == truth_coupling(0.5, 4.0)
    p = PressureInputs(claim_rate=100, raw_cost=1, fidelity=0.5, bandwidth=50)
    assert ModelParams.from_pressure(1.0, 1.0, p).q == 0.25
    with pytest.raises(DomainError):
        ModelParams(var_t=0.0, var_delta=1.0, q=0.5)
    with pytest.raises(DomainError):
        ModelParams(var_t=1.0, var_delta=-1.0, q=0.5)


def test_monotone_on_grid():
    qs = np.linspace(0, 1, 100)
    rs = np.geomspace(1e-3, 1e3, 100)
    for mode in (LIN, BER):
        table = np.array([[truth_coupling(q, r, mode) for r in rs] for q in qs])
        assert np.all(np.diff(table, axis=1) <= 0)  # nonincreasing in r
        assert np.all(np.diff(table, axis=0) >= 0)  # nondecreasing in q


@given(rates, ratios)
def test_linear_dominates_bernoulli(q, r):
    lin, ber = truth_coupling(q, r, LIN), truth_coupling(q, r, BER)
    assert lin >= ber
    if q in (0.0, 1.0) or r == 0.0:
        assert lin == ber


@given(st.floats(0.01, 0.99), st.floats(1e-3, 1e4))
def test_budget_round_trip(rho_min, r):
    q = coupling_budget(rho_min, r)
    assert 0.0 <= q <= 1.0
    assert truth_coupling(q, r, LIN) >= rho_min - 1e-12


@given(
    positive, positive, st.floats(0.01, 1.0), positive, st.floats(1e-3, 1e3), st.floats(1e-3, 1e3)
)
def test_pressure_unit_invariance(R, c, kappa, B, k, m):
    # time unit scales R and B by k; effort unit scales c and B by m
    base = PressureInputs(R, c, kappa, B)
    scaled = PressureInputs(R * k, c * m, kappa, B * k * m)
    assert scaled.pressure == pytest.approx(base.pressure, rel=1e-12)
    assert scaled.q == pytest.approx(base.q, rel=1e-12)


def test_common_scaling_of_all_three_inputs_scales_pressure():
    base = PressureInputs(10, 2, 0.5, 8)
    scaled = PressureInputs(30, 6, 0.5, 24)
    assert scaled.pressure == pytest.approx(3 * base.pressure)


@given(st.floats(0.01, 0.99), st.floats(1.0001, 1e3))
def test_contour_identity(rho, lam):
    r = contour_ratio(rho, lam)
    assert truth_coupling(1 / lam, r) == pytest.approx(rho, abs=1e-12)


def test_contour_needs_pressure_above_one():
    assert contour_ratio(0.5, 2) == pytest.approx(12.0)
    with pytest.raises(DomainError):
        contour_ratio(0.5, 1.0)


def test_mode_parse():
    assert MixingMode.parse("LinearShrinkage") is LIN
    assert MixingMode.parse("bernoulli_mixture") is BER
    with pytest.raises(DomainError):
        MixingMode.parse("quadratic")
