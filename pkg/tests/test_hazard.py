from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcpmev import oracles
from mcpmev.errors import DomainError, OutOfRegime, ProbabilityError
from mcpmev.hazard import (
    Action,
    ConcurrencyModel,
    HazardParams,
    ProposerPolicyInput,
    ReactionSpec,
    accrual,
    alpha_star_n,
    delay_sensitivity,
    dominance_threshold,
    drop_cutoff,
    envelope,
    envelope_one_hazard,
    immediate_threshold,
    interblock_total,
    optimal_delay,
    optimal_delay_one_hazard,
    proposer_policy,
    u_mev,
)
from mcpmev.numeric import integrate

UNIT = HazardParams(1.0, 1.0, 1.0)
LN2 = math.log(2.0)


def test_accrual_values():
    assert accrual(0.0, UNIT) == 0.0
    assert accrual(LN2, UNIT) == pytest.approx(0.375, abs=1e-15)
    assert accrual(50.0, UNIT) == pytest.approx(0.5, abs=1e-15)


def test_accrual_matches_integral_of_rate():
    p = HazardParams(2.0, 0.7, 0.4)
    direct = integrate(lambda s: p.A * p.k * math.exp(-p.k * s) * math.exp(-p.lam * s), 0.0, 1.3)
    assert accrual(1.3, p) == pytest.approx(direct, rel=1e-12)


def test_u_mev_values():
    assert u_mev(0.0, 3.7, UNIT) == 3.7
    assert u_mev(LN2, 0.5, UNIT) == pytest.approx(0.625, abs=1e-15)
    assert u_mev(60.0, 0.0, UNIT) == pytest.approx(0.5, abs=1e-15)


def test_optimal_delay_examples():
    assert optimal_delay(1.0, UNIT).alpha == 0.0
    assert optimal_delay(3.0, UNIT).alpha == 0.0
    ch = optimal_delay(0.5, UNIT)
    assert ch.alpha == pytest.approx(LN2, abs=1e-15)
    assert ch.value == pytest.approx(0.625, abs=1e-15)
    sat = optimal_delay(0.0, UNIT)
    assert sat.saturated and sat.alpha is None and sat.value == 0.5


def test_optimal_delay_agrees_with_numeric_oracle():
    arg, val = oracles.numeric_delay_optimum(0.5, 1.0, 1.0, 1.0, 1.0)
    assert arg == pytest.approx(LN2, abs=1e-10)
    assert val == pytest.approx(0.625, abs=1e-14)


def test_envelope_examples():
    assert envelope(0.0, UNIT) == 0.5
    assert envelope(0.5, UNIT) == pytest.approx(0.625, abs=1e-15)
    assert envelope(5.0, UNIT) == 5.0


def test_immediate_threshold_examples():
    assert immediate_threshold(UNIT) == 1.0
    assert immediate_threshold(HazardParams(2.0, 3.0, 1.5)) == 4.0
    assert immediate_threshold(HazardParams(1.0, 1.0, 1.0, 0.5)) == 2.0


def test_drop_cutoff_examples():
    assert drop_cutoff(0.4, UNIT) == 0.0
    assert drop_cutoff(0.5, UNIT) == 0.0
    assert drop_cutoff(0.625, UNIT) == pytest.approx(0.5, abs=1e-14)


def test_proposer_policy_examples():
    assert proposer_policy(ProposerPolicyInput(0.1, 0.625), UNIT).kind is Action.DROP
    keep = proposer_policy(ProposerPolicyInput(0.5, 0.625), UNIT)
    assert keep.kind is Action.KEEP and keep.alpha == pytest.approx(LN2)
    assert proposer_policy(ProposerPolicyInput(2.0, 0.0), UNIT) == proposer_policy(ProposerPolicyInput(2.0, 0.0), UNIT)
    assert proposer_policy(ProposerPolicyInput(2.0, 0.0), UNIT).alpha == 0.0


def test_proposer_policy_keeps_exactly_at_cutoff():
    p = HazardParams(1.3, 0.8, 0.6, 0.9)
    beta = envelope(0.4, p)
    assert proposer_policy(ProposerPolicyInput(0.4, beta), p).kind is Action.KEEP


def test_interblock_total_examples():
    assert interblock_total([]) == 0.0
    assert interblock_total([ReactionSpec(1, 1, 0, 5, 0)]) == 5.0
    two = [ReactionSpec(0.5, 0.5, 0.5, 4, 2), ReactionSpec(0.25, 1, 0, 8, 0)]
    assert interblock_total(two) == pytest.approx(3.5, abs=1e-15)
    with pytest.raises(ProbabilityError):
        interblock_total([ReactionSpec(1.2, 0, 0, 0, 0)])
    with pytest.raises(ProbabilityError):
        interblock_total([ReactionSpec(1, 0.7, 0.7, 0, 0)])


def test_zero_tip_hazard_saturates_with_full_tip():
    p = HazardParams(1.0, 1.0, 1.0, 0.0)
    ch = optimal_delay(2.0, p)
    assert ch.saturated and ch.value == pytest.approx(2.5)
    assert envelope(2.0, p) == pytest.approx(2.5)
    assert immediate_threshold(p) == math.inf


def test_fast_tip_decay_regime_is_all_or_nothing():
    p = HazardParams(1.0, 1.0, 1.0, 3.0)
    assert optimal_delay(0.7, p).alpha == 0.0
    assert optimal_delay(0.3, p).saturated
    assert envelope(0.3, p) == 0.5 and envelope(0.7, p) == 0.7
    assert immediate_threshold(p) == 0.5


def test_invalid_params():
    with pytest.raises(DomainError):
        HazardParams(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        HazardParams(1.0, 1.0, 1.0, -0.1)
    with pytest.raises(DomainError):
        envelope(-1.0, UNIT)


params = st.tuples(
    st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(0.05, 0.95)
).map(lambda t: HazardParams(t[0], t[1], t[2], t[3] * (t[1] + t[2])))


@settings(max_examples=200, deadline=None)
@given(params, st.floats(1e-3, 2.0))
def test_envelope_dominates_sampled_delays(p, frac):
    tau = frac * immediate_threshold(p)
    m = envelope(tau, p)
    for a in (0.0, 0.1, 0.5, 1.0, 3.0, 10.0):
        assert u_mev(a, tau, p) <= m * (1 + 1e-12)
    assert m >= max(tau, envelope(0.0, p)) * (1 - 1e-12)


@settings(max_examples=200, deadline=None)
@given(params, st.floats(1e-3, 1.0), st.floats(1e-3, 1.0))
def test_envelope_nondecreasing(p, f1, f2):
    t1, t2 = sorted((f1, f2))
    thr = immediate_threshold(p)
    assert envelope(t1 * thr, p) <= envelope(t2 * thr, p) * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(1e-3, 2.0))
def test_one_hazard_forms_agree(A, k, lam, frac):
    p = HazardParams(A, k, lam)
    tau = frac * A * k / lam
    assert envelope(tau, p) == pytest.approx(envelope_one_hazard(tau, p), rel=1e-12)
    assert optimal_delay(tau, p).alpha == pytest.approx(optimal_delay_one_hazard(tau, p), rel=1e-12, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(params, st.floats(1.0 + 1e-6, 30.0))
def test_drop_cutoff_inverts_envelope(p, mult):
    beta = envelope(0.0, p) * mult
    assert envelope(drop_cutoff(beta, p), p) == pytest.approx(beta, rel=1e-12, abs=1e-12)


# -- concurrency model ---------------------------------------------------------

def test_delay_sensitivity_examples():
    same = ConcurrencyModel(1.0, 1.0, 1.0, 1.0, 1.0)
    n = 2.0
    tau = same.A * same.k(n) / same.lam(n)
    assert delay_sensitivity(n, tau, same) == pytest.approx(0.0, abs=1e-15)

    m = ConcurrencyModel(1.0, 1.0, 1.0, 1.0, 0.0)
    n = 3.0
    assert delay_sensitivity(n, n, m) == pytest.approx(1 / n**2, rel=1e-12)

    const_k = ConcurrencyModel(2.0, 1.5, 0.0, 0.5, 1.0)
    assert delay_sensitivity(2.0, 0.5, const_k) < 0


@pytest.mark.parametrize(
    "model,n,tau",
    [
        (ConcurrencyModel(1.0, 1.0, 1.0, 1.0, 0.0), 3.0, 1.0),
        (ConcurrencyModel(2.0, 1.5, 0.0, 0.5, 1.0), 2.0, 0.5),
        (ConcurrencyModel(3.0, 0.7, 0.5, 0.4, 0.3), 1.7, 0.9),
    ],
)
def test_delay_sensitivity_matches_finite_difference(model, n, tau):
    h = 1e-5
    fd = (alpha_star_n(n + h, tau, model, clip=False) - alpha_star_n(n - h, tau, model, clip=False)) / (2 * h)
    assert delay_sensitivity(n, tau, model) == pytest.approx(fd, abs=1e-6)


def test_delay_sensitivity_out_of_regime():
    m = ConcurrencyModel(1.0, 1.0, 0.0, 1.0, 0.0)
    with pytest.raises(OutOfRegime):
        delay_sensitivity(1.0, 5.0, m)


def test_dominance_threshold_examples():
    const = ConcurrencyModel(1.0, 1.0, 0.0, 1.0, 0.0)
    assert dominance_threshold(const, 0.3, 0.4, (1.0, 5.0)) is None
    # tau above the immediate threshold for every n
    assert dominance_threshold(ConcurrencyModel(1.0, 1.0, 1.0, 1.0, 0.5), 100.0, 0.0, (1.0, 5.0)) is None


def test_dominance_threshold_finds_crossing():
    m = ConcurrencyModel(1.0, 1.0, 1.0, 1.0, 0.5)
    tau = 0.3
    lo, hi = 1.0, 6.0
    m_lo, m_hi = envelope(tau, m.hazard(lo)), envelope(tau, m.hazard(hi))
    beta = 0.5 * (m_lo + m_hi)
    n = dominance_threshold(m, tau, beta, (lo, hi))
    assert n is not None and lo < n <= hi
    # grid oracle: first point with M >= beta
    grid = [lo + 0.1 * i for i in range(int(round((hi - lo) / 0.1)) + 1)]
    first = next(x for x in grid if envelope(tau, m.hazard(x)) >= beta)
    assert n == pytest.approx(first)
