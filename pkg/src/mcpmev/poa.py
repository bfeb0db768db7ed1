"""Proof-of-availability latency: Erlang success odds, gamma races and the
stealability bound."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from .errors import DegenerateRates, DomainError
from .numeric import DEFAULT_TOL, Tolerance, integrate

_DIRECT_SUM_MAX_ELL = 50


def _check_ell(ell: int) -> None:
    if int(ell) != ell or ell < 1:
        raise DomainError(f"ell must be a positive integer, got {ell}")


def _check_rate(name: str, mu: float) -> None:
    if not (mu > 0 and math.isfinite(mu)):
        raise DomainError(f"{name} must be finite and > 0, got {mu}")


def _poisson_head(ell: int, x: float) -> float:
    """``P[Poisson(x) < ell] = e^{-x} sum_{r<ell} x^r/r!`` with terms in log-space."""
    log_x = math.log(x)
    total = 0.0
    log_term = -x
    for r in range(ell):
        if r:
            log_term += log_x - math.log(r)
        total += math.exp(log_term)
    return total


def _poisson_tail(ell: int, x: float) -> float:
    """``P[Poisson(x) >= ell]`` summed from ``r = ell`` upward; accurate when it is small."""
    log_x = math.log(x)
    log_term = -x + ell * log_x - math.lgamma(ell + 1)
    total = 0.0
    r = ell
    while True:
        term = math.exp(log_term)
        total += term
        r += 1
        log_term += log_x - math.log(r)
        if term <= 1e-17 * total and r > x:
            return total


def poa_success(ell: int, mu: float, budget: float) -> float:
    """Probability that ``ell`` co-signatures at rate ``mu`` arrive within ``budget``."""
    _check_ell(ell)
    _check_rate("mu", mu)
    if not budget >= 0:
        raise DomainError(f"budget must be >= 0, got {budget}")
    x = mu * budget
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < ell:
        return min(_poisson_tail(ell, x), 1.0)
    return max(1.0 - _poisson_head(ell, x), 0.0)


def poa_survival(ell: int, mu: float, budget: float) -> float:
    """``1 - poa_success``, accurate in the far tail."""
    _check_ell(ell)
    _check_rate("mu", mu)
    if not budget >= 0:
        raise DomainError(f"budget must be >= 0, got {budget}")
    x = mu * budget
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < ell:
        return max(1.0 - _poisson_tail(ell, x), 0.0)
    return min(_poisson_head(ell, x), 1.0)


def erlang_pdf(ell: int, mu: float, s: float) -> float:
    if s < 0:
        return 0.0
    if s == 0:
        return mu if ell == 1 else 0.0
    return math.exp(ell * math.log(mu) + (ell - 1) * math.log(s) - mu * s - math.lgamma(ell))


def race_prob(ell: int, mu_i: float, mu_j: float) -> float:
    """Probability that ``j`` collects ``ell`` co-signatures before ``i``."""
    _check_ell(ell)
    _check_rate("mu_i", mu_i)
    _check_rate("mu_j", mu_j)
    if mu_i == mu_j:
        return 0.5
    pj = mu_j / (mu_i + mu_j)
    pi = mu_i / (mu_i + mu_j)
    n = 2 * ell - 1
    if ell <= _DIRECT_SUM_MAX_ELL:
        return sum(math.comb(n, r) * pj**r * pi ** (n - r) for r in range(ell, n + 1))
    log_pj, log_pi = math.log(pj), math.log(pi)
    logs = [
        math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1) + r * log_pj + (n - r) * log_pi
        for r in range(ell, n + 1)
    ]
    top = max(logs)
    return min(math.exp(top) * sum(math.exp(v - top) for v in logs), 1.0)


@dataclass(frozen=True)
class RaceParams:
    ell: int
    mu_i: float
    mu_j: float
    delta_i: float
    delta_j: float

    def __post_init__(self):
        _check_ell(self.ell)
        _check_rate("mu_i", self.mu_i)
        _check_rate("mu_j", self.mu_j)
        if not (self.delta_i >= 0 and self.delta_j >= 0):
            raise DomainError("time budgets must be >= 0")


@dataclass(frozen=True)
class StealabilityTerms:
    integral: float
    race: float
    thief_success: float

    @property
    def bound(self) -> float:
        return min(self.integral, self.race, self.thief_success)


def _erlang_quantile_hi(ell: int, mu: float, eps: float = 1e-17) -> float:
    """A time beyond which the Erlang tail mass is below ``eps``."""
    t = max(ell, 1.0) / mu
    while poa_survival(ell, mu, t) > eps:
        t *= 1.5
    return t


def stealability_terms(p: RaceParams, tol: Tolerance = DEFAULT_TOL) -> StealabilityTerms:
    race = race_prob(p.ell, p.mu_i, p.mu_j)
    thief = poa_success(p.ell, p.mu_j, p.delta_j)
    upper = min(p.delta_j, _erlang_quantile_hi(p.ell, p.mu_j))
    if upper == 0.0:
        return StealabilityTerms(0.0, race, thief)

    def integrand(s: float) -> float:
        return erlang_pdf(p.ell, p.mu_j, s) * poa_survival(p.ell, p.mu_i, s)

    val = integrate(integrand, 0.0, upper, tol)
    return StealabilityTerms(min(max(val, 0.0), 1.0), race, thief)


def stealability_bound(p: RaceParams, tol: Tolerance = DEFAULT_TOL) -> float:
    """Upper bound on the same-tick steal probability: ``P[S_j < S_i, S_j <= delta_j]``,
    never looser than ``min(race, thief success)``."""
    return stealability_terms(p, tol).bound


def hypoexponential_success(rates: Sequence[float], budget: float, rel_tol: float = 1e-9) -> float:
    """CDF at ``budget`` of a sum of independent exponentials with distinct rates."""
    rates = [float(r) for r in rates]
    if not rates:
        raise DomainError("need at least one rate")
    for r in rates:
        _check_rate("rate", r)
    if not budget >= 0:
        raise DomainError(f"budget must be >= 0, got {budget}")
    if len(set(rates)) == 1 and len(rates) > 1:
        warnings.warn("equal rates: using the Erlang CDF", RuntimeWarning, stacklevel=2)
        return poa_success(len(rates), rates[0], budget)
    srt = sorted(rates)
    for a, b in zip(srt, srt[1:]):
        if b - a <= rel_tol * b:
            raise DegenerateRates(f"rates {a} and {b} coincide within {rel_tol} relative")
    if budget == 0.0:
        return 0.0
    surv = 0.0
    for i, ri in enumerate(rates):
        coef = 1.0
        for j, rj in enumerate(rates):
            if j != i:
                coef *= rj / (rj - ri)
        surv += coef * math.exp(-ri * budget)
    return min(max(1.0 - surv, 0.0), 1.0)
