"""Selling access to a held transaction: optimal reserve auctions and the
keep-versus-auction decision."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Union

import numpy as np

from .errors import DomainError, NotRegular
from .hazard import HazardParams, envelope
from .numeric import DEFAULT_TOL, Tolerance, bisect, integrate

_PROBE_POINTS = 1000


@dataclass(frozen=True)
class Uniform:
    vbar: float

    def __post_init__(self):
        if not self.vbar > 0:
            raise DomainError(f"vbar must be > 0, got {self.vbar}")

    def cdf(self, v: float) -> float:
        return min(max(v / self.vbar, 0.0), 1.0)

    def pdf(self, v: float) -> float:
        return 1.0 / self.vbar if 0.0 <= v <= self.vbar else 0.0


@dataclass(frozen=True)
class Custom:
    cdf: Callable[[float], float]
    pdf: Callable[[float], float]
    vbar: float

    def __post_init__(self):
        if not self.vbar > 0:
            raise DomainError(f"vbar must be > 0, got {self.vbar}")


@dataclass(frozen=True)
class PointMass:
    value: float


Distribution = Union[Uniform, Custom, PointMass]


@dataclass(frozen=True)
class AuctionSpec:
    m: int
    dist: Distribution

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"m must be a positive integer, got {self.m}")


def uniform_reserve(vbar: float) -> float:
    if not vbar > 0:
        raise DomainError(f"vbar must be > 0, got {vbar}")
    return vbar / 2.0


def uniform_revenue(vbar: float, r: float, m: int) -> float:
    """Second-price revenue with reserve ``r`` and ``m`` uniform bidders."""
    if not vbar > 0:
        raise DomainError(f"vbar must be > 0, got {vbar}")
    if not 0.0 <= r <= vbar:
        raise DomainError(f"reserve {r} outside [0, {vbar}]")
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    x = r / vbar
    return vbar * ((m - 1) / (m + 1) + x**m - (2 * m / (m + 1)) * x ** (m + 1))


def uniform_opt_revenue(vbar: float, m: int) -> float:
    if not vbar > 0:
        raise DomainError(f"vbar must be > 0, got {vbar}")
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return vbar * ((m - 1) / (m + 1) + 2.0**-m / (m + 1))


def virtual_value(v: float, dist: Distribution) -> float:
    f = dist.pdf(v)
    if not f > 0:
        raise NotRegular(f"density vanishes at v={v}")
    return v - (1.0 - dist.cdf(v)) / f


def _check_regular(dist: Distribution) -> None:
    # Probe the open interior; the density may vanish at the endpoints.
    grid = np.linspace(0.0, dist.vbar, _PROBE_POINTS + 2)[1:-1]
    phis = [virtual_value(float(v), dist) for v in grid]
    if any(b < a for a, b in zip(phis, phis[1:])):
        raise NotRegular("virtual value is not nondecreasing on the probe grid")


def myerson_reserve(dist: Distribution, tol: Tolerance = DEFAULT_TOL) -> float:
    if isinstance(dist, PointMass):
        raise NotRegular("point mass has no density")
    _check_regular(dist)
    lo, hi = 0.0, dist.vbar
    eps = dist.vbar * 1e-12
    phi_lo = virtual_value(lo + eps, dist)
    if phi_lo >= 0:
        return lo
    return bisect(lambda v: virtual_value(v, dist), lo + eps, hi - eps, tol)


def myerson_revenue_numeric(spec: AuctionSpec, tol: Tolerance = DEFAULT_TOL) -> float:
    """Optimal expected revenue ``E[max(phi(V_max), 0)]`` by quadrature."""
    dist = spec.dist
    r = myerson_reserve(dist, tol)
    m = spec.m

    def integrand(v: float) -> float:
        f = dist.pdf(v)
        if f <= 0:
            return 0.0
        F = dist.cdf(v)
        # phi(v) f(v) = v f(v) - (1 - F(v)) avoids dividing by f
        return (v * f - (1.0 - F)) * m * F ** (m - 1)

    return integrate(integrand, r, dist.vbar, tol)


class SaleChoice(Enum):
    KEEP = "keep"
    AUCTION = "auction"


def keep_vs_auction(
    tau: float,
    hazard: HazardParams,
    rev_curve: Callable[[float], float],
    alpha_grid: Iterable[float],
) -> tuple[SaleChoice, float]:
    """Keep the transaction unless some auction delay beats the delay envelope."""
    keep = envelope(tau, hazard)
    best = max((rev_curve(float(a)) for a in alpha_grid), default=-math.inf)
    if best > keep:
        return SaleChoice.AUCTION, best
    return SaleChoice.KEEP, keep


def posted_price_revenue(tau: float, alpha: float, hazard: HazardParams) -> float:
    """Revenue from identical bidders: the discounted tip, charged as a posted price."""
    if alpha < 0 or tau < 0:
        raise DomainError("tau and alpha must be >= 0")
    return math.exp(-hazard.lam * alpha) * tau


@dataclass(frozen=True)
class BidderValueModel:
    """Bidder values ``e^{-lam alpha} tau + D`` where ``D`` is drawn per bidder
    by ``mev_bonus_sampler(rng, size)``."""

    tau: float
    alpha: float
    hazard: HazardParams
    mev_bonus_sampler: Callable[[np.random.Generator, int], np.ndarray]

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        base = math.exp(-self.hazard.lam * self.alpha) * self.tau
        return base + np.asarray(self.mev_bonus_sampler(rng, m), dtype=float)
