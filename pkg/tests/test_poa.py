from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from mcpmev import oracles
from mcpmev.errors import DegenerateRates, DomainError
from mcpmev.poa import (
    RaceParams,
    erlang_pdf,
    hypoexponential_success,
    poa_success,
    poa_survival,
    race_prob,
    stealability_bound,
    stealability_terms,
)


def test_poa_success_examples():
    assert poa_success(1, 1.0, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    assert poa_success(2, 1.0, 1.0) == pytest.approx(1 - 2 * math.exp(-1), abs=1e-15)
    assert poa_success(3, 2.0, 0.0) == 0.0
    assert poa_success(3, 2.0, math.inf) == 1.0


def test_poa_success_monte_carlo():
    p, se = oracles.erlang_success_mc(2, 1.0, 1.0, 1_000_000, np.random.default_rng(7))
    assert abs(p - poa_success(2, 1.0, 1.0)) <= 4 * se


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 400), st.floats(0.01, 50), st.floats(0.0, 100))
def test_poa_success_matches_gamma_cdf(ell, mu, budget):
    ref = special.gammainc(ell, mu * budget)
    assert poa_success(ell, mu, budget) == pytest.approx(ref, rel=1e-9, abs=1e-14)
    assert poa_success(ell, mu, budget) + poa_survival(ell, mu, budget) == pytest.approx(1.0, abs=1e-12)


def test_far_tail_stays_accurate():
    # both tails far below machine epsilon relative to 1
    assert poa_success(40, 1.0, 1.0) == pytest.approx(special.gammainc(40, 1.0), rel=1e-9)
    assert poa_survival(5, 1.0, 100.0) == pytest.approx(special.gammaincc(5, 100.0), rel=1e-9)


def test_erlang_pdf_matches_scipy():
    for ell, mu, s in [(1, 2.0, 0.3), (4, 1.5, 2.0), (200, 3.0, 60.0)]:
        ref = stats.gamma.pdf(s, ell, scale=1 / mu)
        assert erlang_pdf(ell, mu, s) == pytest.approx(ref, rel=1e-10)


def test_race_prob_examples():
    for ell in (1, 2, 7, 80):
        assert race_prob(ell, 3.0, 3.0) == 0.5
    assert race_prob(1, 1.0, 2.0) == pytest.approx(2 / 3, abs=1e-15)
    assert race_prob(3, 1.0, 1e-12) == pytest.approx(0.0, abs=1e-30)
    assert race_prob(3, 1.0, 0.5) == pytest.approx(17 / 81, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 300), st.floats(0.01, 100), st.floats(0.01, 100))
def test_race_prob_matches_regularized_beta(ell, mu_i, mu_j):
    ref = special.betainc(ell, ell, mu_j / (mu_i + mu_j))
    assert race_prob(ell, mu_i, mu_j) == pytest.approx(ref, rel=1e-8, abs=1e-14)


def test_race_prob_monte_carlo():
    p, se = oracles.race_mc(1, 1.0, 2.0, 1_000_000, np.random.default_rng(11))
    assert abs(p - 2 / 3) <= 4 * se


def test_stealability_limits():
    big = RaceParams(2, 1.0, 1.5, 0.0, 1e6)
    assert stealability_terms(big).integral == pytest.approx(race_prob(2, 1.0, 1.5), abs=1e-9)
    assert stealability_bound(RaceParams(2, 1.0, 1.0, 1.0, 0.0)) == 0.0


def test_stealability_example_against_joint_monte_carlo():
    p = RaceParams(2, 1.0, 1.0, 1.0, 1.0)
    b = stealability_bound(p)
    assert 0.0 < b < min(0.5, 1 - 2 * math.exp(-1))
    est, se = oracles.joint_race_mc(2, 1.0, 1.0, 1.0, 1_000_000, np.random.default_rng(5))
    assert abs(est - b) <= 4 * se


def test_hypoexponential_examples():
    assert hypoexponential_success([2.0], 0.7) == pytest.approx(1 - math.exp(-1.4), abs=1e-15)
    assert hypoexponential_success([1.0, 2.0], 1.0) == pytest.approx(1 - 2 * math.exp(-1) + math.exp(-2), abs=1e-15)
    assert hypoexponential_success([1.0, 2.0], 0.0) == 0.0
    p, se = oracles.hypoexponential_mc([1.0, 2.0], 1.0, 1_000_000, np.random.default_rng(3))
    assert abs(p - 0.400425) <= 4 * se


def test_hypoexponential_degenerate_rates():
    with pytest.raises(DegenerateRates):
        hypoexponential_success([1.0, 1.0 + 1e-12], 1.0)
    with pytest.warns(RuntimeWarning):
        val = hypoexponential_success([2.0, 2.0], 1.0)
    assert val == pytest.approx(poa_success(2, 2.0, 1.0))


def test_invalid_inputs():
    with pytest.raises(DomainError):
        poa_success(0, 1.0, 1.0)
    with pytest.raises(DomainError):
        poa_success(1, -1.0, 1.0)
    with pytest.raises(DomainError):
        race_prob(2, 0.0, 1.0)
    with pytest.raises(DomainError):
        hypoexponential_success([], 1.0)
