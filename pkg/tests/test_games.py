from __future__ import annotations


import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcpmev import oracles
from mcpmev.errors import DomainError, NoRoot, ProbabilityError
from mcpmev.games import (
    CensorUserParams,
    SnipeChoice,
    StealParams,
    TimingParams,
    anti_steal_multiplicity,
    deadline,
    expected_share,
    exponential_rho,
    heuristic_rounds,
    optimal_rounds,
    snipe_best_response,
    steal_gain,
    steal_mixed_equilibrium,
    steal_profitable,
    user_utility,
)


# -- censorship re-broadcast ---------------------------------------------------

def test_user_utility_examples():
    p = CensorUserParams(10, 1, 1, 0.5)
    assert user_utility(0, p) == 0.0
    assert user_utility(3, p) == pytest.approx(5.75, abs=1e-15)
    q0 = CensorUserParams(10, 1, 2, 0.0)
    assert user_utility(1, q0) == 8.0


@pytest.mark.parametrize(
    "params,expected",
    [((1, 1, 1, 0.5), 0), ((10, 1, 1, 0.5), 3), ((10, 1, 1, 0.0), 1), ((1, 1, 1, 0.0), 0)],
)
def test_optimal_rounds_examples(params, expected):
    assert optimal_rounds(CensorUserParams(*params)) == expected


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 100), st.floats(0.01, 10), st.integers(1, 5), st.floats(0.0, 0.99))
def test_optimal_rounds_matches_brute_force(v, c, s, Q):
    p = CensorUserParams(v, c, s, Q)
    k = optimal_rounds(p)
    ref = oracles.brute_force_rounds(v, c, s, Q)
    # ties in utility can make either index a maximizer
    assert user_utility(k, p) == pytest.approx(user_utility(ref, p), rel=1e-12, abs=1e-12)


def test_heuristic_rounds_examples():
    assert heuristic_rounds(10, 3) == 3
    assert heuristic_rounds(4, 4) == 1
    assert heuristic_rounds(2.5, 1) == 2
    with pytest.raises(DomainError):
        heuristic_rounds(0, 1)


def test_censor_params_validation():
    with pytest.raises(ProbabilityError):
        CensorUserParams(1, 1, 1, 1.0)
    with pytest.raises(DomainError):
        CensorUserParams(1, 1, 0, 0.5)


# -- stealing --------------------------------------------------------------------

def test_steal_profitable_examples():
    assert steal_profitable(StealParams(0.3, 0.2, 4, 10))
    assert not steal_profitable(StealParams(0.3, 0.2, 4, 8))
    assert not steal_profitable(StealParams(0.0, 0.0, 0.1, 1e9))


def test_steal_params_validation():
    with pytest.raises(ProbabilityError):
        StealParams(0.7, 0.6, 1, 1)
    with pytest.raises(DomainError):
        StealParams(0.1, 0.1, 1, 1, m=0)


def test_mixed_equilibrium_examples():
    assert steal_mixed_equilibrium(StealParams(0.5, 0.5, 0.5, 2, m=1)) == 1.0
    p = StealParams(0.5, 0.0, 0.75, 2.0, m=2)
    assert steal_mixed_equilibrium(p) == pytest.approx(0.5, abs=1e-14)
    # hand form of the gain for m=2: 0.25 - 0.5 p
    for x in (0.0, 0.3, 1.0):
        assert steal_gain(x, p) == pytest.approx(0.25 - 0.5 * x, abs=1e-15)
    assert steal_mixed_equilibrium(StealParams(0.2, 0.0, 1.0, 5.0, m=4)) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0), st.integers(1, 60))
def test_expected_share_matches_binomial_sum(p, m):
    assert expected_share(p, m) == pytest.approx(oracles.binomial_share(p, m), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.integers(2, 30))
def test_mixed_equilibrium_is_indifferent(win, tau, phi, m):
    p = StealParams(win, 0.0, phi, tau, m=m)
    x = steal_mixed_equilibrium(p)
    if 0.0 < x < 1.0:
        assert abs(steal_gain(x, p)) <= 1e-12 * max(1.0, phi)
    elif x == 0.0:
        assert steal_gain(0.0, p) <= 0
    else:
        assert steal_gain(1.0, p) >= 0


def test_anti_steal_multiplicity_examples():
    assert anti_steal_multiplicity(10, 3) == 3
    assert anti_steal_multiplicity(2, 3) == 0
    # 10/2 = 5 is not below 5; 10/3 is
    assert anti_steal_multiplicity(10, 5) == 2


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, 1e4), st.floats(0.01, 100))
def test_anti_steal_multiplicity_matches_scan(tau, phi):
    assert anti_steal_multiplicity(tau, phi) == oracles.scan_multiplicity(tau, phi)


# -- timing ----------------------------------------------------------------------

BASE = TimingParams(W=1, w=0, pi_ba=0.4, pi_snipe=0.8)


def test_snipe_best_response_examples():
    assert snipe_best_response(BASE, 0.6) is SnipeChoice.WAIT
    assert snipe_best_response(BASE, 0.5) is SnipeChoice.INDIFFERENT
    assert snipe_best_response(BASE, 0.0) is SnipeChoice.SEND_NOW


def test_deadline_examples():
    assert deadline(BASE) == pytest.approx(0.5, abs=1e-15)
    near = TimingParams(W=1, w=0, pi_ba=1e-6, pi_snipe=1.0)
    assert deadline(near) == pytest.approx(1.0 - 1e-6, abs=1e-12)
    with pytest.raises(NoRoot):
        deadline(TimingParams(W=1, w=1, pi_ba=0.4, pi_snipe=0.8))
    with pytest.raises(NoRoot):
        deadline(TimingParams(W=1, w=0, pi_ba=0.8, pi_snipe=0.4))


def test_deadline_is_root_for_curved_rho():
    p = TimingParams(W=2, w=0.5, pi_ba=0.3, pi_snipe=0.9, rho_b=exponential_rho(2.0))
    s = deadline(p)
    assert 0 < s < 1
    assert abs(p.h(s)) <= 1e-14
    assert snipe_best_response(p, p.rho_b(s - 1e-3)) is SnipeChoice.WAIT
    assert snipe_best_response(p, p.rho_b(s + 1e-3)) is SnipeChoice.SEND_NOW


def test_exponential_rho_endpoints():
    rho = exponential_rho(3.0)
    assert rho(0.0) == pytest.approx(1.0) and rho(1.0) == pytest.approx(0.0, abs=1e-15)
    assert exponential_rho(0.0)(0.25) == 0.75
