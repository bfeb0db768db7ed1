"""Strategic interactions: censorship re-broadcast, tip stealing, snipe timing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .errors import DomainError, NoRoot, ProbabilityError
from .numeric import TIGHT_TOL, Tolerance, bisect


def _prob(name: str, v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise ProbabilityError(f"{name}={v} outside [0, 1]")


@dataclass(frozen=True)
class CensorUserParams:
    """User who re-broadcasts to ``s`` proposers per round, each round censored
    with probability ``Q``."""

    v: float
    c: float
    s: int
    Q: float

    def __post_init__(self):
        if not (self.v > 0 and self.c > 0):
            raise DomainError("v and c must be > 0")
        if int(self.s) != self.s or self.s < 1:
            raise DomainError(f"s must be a positive integer, got {self.s}")
        if not 0.0 <= self.Q < 1.0:
            raise ProbabilityError(f"Q={self.Q} outside [0, 1)")


def user_utility(k: int, p: CensorUserParams) -> float:
    if k < 0 or int(k) != k:
        raise DomainError(f"k must be a nonnegative integer, got {k}")
    return p.v * (1.0 - p.Q**k) - k * p.s * p.c


def optimal_rounds(p: CensorUserParams) -> int:
    """Utility-maximizing number of rounds.

    Round ``k+1`` pays off iff ``v Q^k (1-Q) > s c``; the marginal gain is
    strictly decreasing, so we count the rounds that pay.
    """
    cost = p.s * p.c
    if p.Q == 0.0:
        return 1 if p.v > cost else 0
    k = 0
    gain = p.v * (1.0 - p.Q)
    while gain > cost:
        k += 1
        gain *= p.Q
    return k


def heuristic_rounds(v: float, c: float) -> int:
    if not (v > 0 and c > 0):
        raise DomainError("v and c must be > 0")
    return math.floor(v / c)


@dataclass(frozen=True)
class StealParams:
    """One potential thief's view of a transaction it may copy.

    ``sigma`` is the chance of winning a same-tick ordering contest and
    ``rho`` the chance the victim misses the tick while the thief makes it.
    """

    sigma: float
    rho: float
    phi: float
    tau: float
    delta_x: float = 0.0
    m: int = 1

    def __post_init__(self):
        _prob("sigma", self.sigma)
        _prob("rho", self.rho)
        if self.sigma + self.rho > 1.0 + 1e-12:
            raise ProbabilityError("sigma + rho exceeds 1")
        for name in ("phi", "tau", "delta_x"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and >= 0, got {v}")
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"m must be a positive integer, got {self.m}")

    @property
    def win(self) -> float:
        return self.sigma + self.rho

    @property
    def prize(self) -> float:
        return self.tau + self.delta_x


def steal_profitable(p: StealParams) -> bool:
    return p.win * p.prize > p.phi


def expected_share(p: float, m: int) -> float:
    """``E[1/(N+1)]`` for ``N ~ Binomial(m-1, p)``."""
    _prob("p", p)
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 1.0 / m
    # 1 - (1-p)^m computed without cancellation for small p
    return -math.expm1(m * math.log1p(-p)) / (m * p)


def steal_gain(x: float, p: StealParams) -> float:
    """Expected gain of stealing when every other thief steals with prob ``x``."""
    return p.win * p.prize * expected_share(x, p.m) - p.phi


def steal_mixed_equilibrium(p: StealParams, tol: Tolerance = TIGHT_TOL) -> float:
    """Symmetric equilibrium stealing probability among ``m`` thieves."""
    prize = p.win * p.prize
    if prize <= p.phi:
        return 0.0
    if prize >= p.m * p.phi:
        return 1.0
    return bisect(lambda x: steal_gain(x, p), 0.0, 1.0, tol)


def anti_steal_multiplicity(tau: float, phi: float) -> int:
    """Fewest rival thieves ``n`` making the equal split ``tau/(n+1)`` fall
    strictly below ``phi``."""
    if not phi > 0:
        raise DomainError(f"phi must be > 0, got {phi}")
    if not tau >= 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    n = max(int(math.floor(tau / phi)) - 1, 0)
    while n > 0 and tau / n < phi:
        n -= 1
    while not tau / (n + 1) < phi:
        n += 1
    return n


class SnipeChoice(Enum):
    WAIT = "wait"
    SEND_NOW = "send_now"
    INDIFFERENT = "indifferent"


RhoFn = Callable[[float], float]


def linear_rho(s: float) -> float:
    return 1.0 - s


def exponential_rho(gamma: float) -> RhoFn:
    """``(e^{-gamma s} - e^{-gamma}) / (1 - e^{-gamma})``; linear as gamma -> 0."""
    if gamma == 0:
        return linear_rho
    denom = -math.expm1(-gamma)

    def rho(s: float) -> float:
        return (math.exp(-gamma * s) - math.exp(-gamma)) / denom

    return rho


@dataclass(frozen=True)
class TimingParams:
    W: float
    w: float
    pi_ba: float
    pi_snipe: float
    rho_b: RhoFn = linear_rho

    def __post_init__(self):
        if not self.W > 0 or not self.w >= 0:
            raise DomainError("need W > 0 and w >= 0")
        _prob("pi_ba", self.pi_ba)
        _prob("pi_snipe", self.pi_snipe)

    def send_now_value(self) -> float:
        return self.pi_ba * self.W + (1.0 - self.pi_ba) * self.w

    def snipe_value(self) -> float:
        return self.pi_snipe * self.W + (1.0 - self.pi_snipe) * self.w

    def h(self, s: float) -> float:
        """Advantage of waiting to snipe when observing at time ``s``."""
        return self.rho_b(s) * self.snipe_value() - self.send_now_value()


def snipe_best_response(p: TimingParams, rho_at_obs: float, rel_tol: float = 1e-12) -> SnipeChoice:
    _prob("rho_at_obs", rho_at_obs)
    wait = rho_at_obs * p.snipe_value()
    now = p.send_now_value()
    if abs(wait - now) <= rel_tol * max(abs(wait), abs(now), 1e-300):
        return SnipeChoice.INDIFFERENT
    return SnipeChoice.WAIT if wait > now else SnipeChoice.SEND_NOW


def deadline(p: TimingParams, tol: Tolerance = TIGHT_TOL) -> float:
    """Last observation time at which waiting to snipe still pays."""
    if not p.W > p.w:
        raise NoRoot("no deadline when W <= w")
    if not p.pi_snipe > p.pi_ba:
        raise NoRoot("no deadline unless pi_snipe > pi_ba")
    h0, h1 = p.h(0.0), p.h(1.0)
    if not (h0 > 0 and h1 < 0):
        if h1 == 0:
            return 1.0
        raise NoRoot(f"h does not change sign on [0, 1]: h(0)={h0}, h(1)={h1}")
    return bisect(p.h, 0.0, 1.0, tol)
