"""Independent reference computations used to check the closed forms.

Each routine reaches its answer by a different route from the module it
checks: brute-force enumeration, explicit sums, generic numerical optimization
or direct Monte Carlo of the generative story.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .numeric import Tolerance, bisect, maximize_scalar

ORACLE_TOL = Tolerance(abs_tol=1e-14, rel_tol=1e-14, max_iter=500)


# -- hazard ------------------------------------------------------------------

def delay_payoff(alpha: float, tau: float, A: float, k: float, lam: float, delta: float) -> float:
    """Accrued MEV ``A k int_0^alpha e^{-(k+lam)s} ds`` plus the discounted tip."""
    s = k + lam
    return A * k * (-math.expm1(-s * alpha)) / s + tau * math.exp(-delta * alpha)


def numeric_delay_optimum(tau: float, A: float, k: float, lam: float, delta: float) -> tuple[float, float]:
    """``(argmax, max)`` of the delay payoff on a finite horizon.

    The argmax comes from bisecting the first-order condition; golden-section
    search cannot resolve the argmax of such flat objectives to better than
    ``sqrt(eps)``.  The maximum value comes from golden-section search.
    """
    def slope(a: float) -> float:
        return A * k * math.exp(-(k + lam) * a) - delta * tau * math.exp(-delta * a)

    if slope(0.0) <= 0:
        return 0.0, delay_payoff(0.0, tau, A, k, lam, delta)
    hi = 1.0
    while slope(hi) > 0:
        hi *= 2.0
    arg = bisect(slope, 0.0, hi, ORACLE_TOL)
    _, val = maximize_scalar(lambda a: delay_payoff(a, tau, A, k, lam, delta), 0.0, hi, ORACLE_TOL)
    return arg, max(val, delay_payoff(arg, tau, A, k, lam, delta))


# -- games -------------------------------------------------------------------

def brute_force_rounds(v: float, c: float, s: int, Q: float, k_max: int = 10_000) -> int:
    k = np.arange(k_max + 1, dtype=float)
    util = v * (1.0 - Q**k) - k * s * c
    return int(np.argmax(util))


def binomial_share(p: float, m: int) -> float:
    """``E[1/(N+1)]`` for ``N ~ Binomial(m-1, p)`` by the explicit sum."""
    return math.fsum(math.comb(m - 1, n) * p**n * (1.0 - p) ** (m - 1 - n) / (n + 1) for n in range(m))


def scan_multiplicity(tau: float, phi: float, n_max: int = 10**7) -> int:
    for n in range(n_max):
        if tau / (n + 1) < phi:
            return n
    raise RuntimeError("scan limit reached")


# -- auction -----------------------------------------------------------------

def second_price_revenue_mc(vbar: float, r: float, m: int, n: int, rng: np.random.Generator) -> tuple[float, float]:
    """Mean and standard error of second-price-with-reserve revenue, uniform bidders."""
    vals = rng.random((n, m)) * vbar
    if m == 1:
        top, second = vals[:, 0], np.zeros(n)
    else:
        part = np.partition(vals, m - 2, axis=1)
        top, second = part[:, m - 1], part[:, m - 2]
    rev = np.where(top >= r, np.maximum(second, r), 0.0)
    return float(rev.mean()), float(rev.std(ddof=1) / math.sqrt(n))


# -- poa ---------------------------------------------------------------------

def _arrival_times(ell: int, mu: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sum of ``ell`` exponential inter-arrival times, drawn one stage at a time."""
    t = np.zeros(n)
    for _ in range(ell):
        t += rng.exponential(1.0 / mu, size=n)
    return t


def erlang_success_mc(ell: int, mu: float, budget: float, n: int, rng: np.random.Generator) -> tuple[float, float]:
    hit = _arrival_times(ell, mu, n, rng) <= budget
    p = hit.mean()
    return float(p), math.sqrt(p * (1 - p) / n)


def race_mc(ell: int, mu_i: float, mu_j: float, n: int, rng: np.random.Generator) -> tuple[float, float]:
    s_i = _arrival_times(ell, mu_i, n, rng)
    s_j = _arrival_times(ell, mu_j, n, rng)
    p = (s_j < s_i).mean()
    return float(p), math.sqrt(p * (1 - p) / n)


def joint_race_mc(ell: int, mu_i: float, mu_j: float, delta_j: float, n: int, rng: np.random.Generator) -> tuple[float, float]:
    s_i = _arrival_times(ell, mu_i, n, rng)
    s_j = _arrival_times(ell, mu_j, n, rng)
    p = ((s_j < s_i) & (s_j <= delta_j)).mean()
    return float(p), math.sqrt(p * (1 - p) / n)


def hypoexponential_mc(rates: Sequence[float], budget: float, n: int, rng: np.random.Generator) -> tuple[float, float]:
    t = np.zeros(n)
    for r in rates:
        t += rng.exponential(1.0 / r, size=n)
    p = (t <= budget).mean()
    return float(p), math.sqrt(p * (1 - p) / n)


# -- externality -------------------------------------------------------------

def brute_force_argmax(utility: Callable[[int], float], k_max: int) -> int:
    """Smallest maximizer of ``utility`` over ``0..k_max``."""
    best_k, best_u = 0, utility(0)
    for k in range(1, k_max + 1):
        u = utility(k)
        if u > best_u:
            best_k, best_u = k, u
    return best_k


def inclusion_mc(hits: Sequence[float], n: int, rng: np.random.Generator) -> tuple[float, float]:
    """Frequency that at least one of independent inclusion events fires."""
    any_hit = np.zeros(n, dtype=bool)
    for h in hits:
        any_hit |= rng.random(n) < h
    p = any_hit.mean()
    return float(p), math.sqrt(p * (1 - p) / n)


def enumerate_advance(f: float, tau_star: float, deltas: Sequence[float], benefit: Callable[[int], float], K_max: int):
    best = None
    for K in range(1, K_max + 1):
        cost = math.fsum(f + tau_star + d for d in deltas[:K])
        if benefit(K) > cost:
            best = K
    return best


def numeric_spam_optimum(profit: Callable[[float], float], hi: float) -> tuple[float, float]:
    return maximize_scalar(profit, 0.0, hi, ORACLE_TOL)
