"""Spam economics and the externality of submitting to many proposers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .errors import DomainError, InsufficientDeltas, NotDiminishing, ProbabilityError, TooManyProposers


@dataclass(frozen=True)
class ConcaveTheta:
    """Exclusion probability ``theta_max (1 - e^{-gamma s})``."""

    theta_max: float
    gamma: float

    def __post_init__(self):
        if not 0.0 < self.theta_max <= 1.0:
            raise ProbabilityError(f"theta_max={self.theta_max} outside (0, 1]")
        if not self.gamma > 0:
            raise DomainError(f"gamma must be > 0, got {self.gamma}")

    def __call__(self, s: float) -> float:
        return self.theta_max * -math.expm1(-self.gamma * s)


@dataclass(frozen=True)
class CliffTheta:
    """Exclusion jumps to ``theta_post`` once spam reaches ``s_cliff``."""

    s_cliff: float
    theta_post: float

    def __post_init__(self):
        if not self.s_cliff >= 0:
            raise DomainError(f"s_cliff must be >= 0, got {self.s_cliff}")
        if not 0.0 < self.theta_post <= 1.0:
            raise ProbabilityError(f"theta_post={self.theta_post} outside (0, 1]")

    def __call__(self, s: float) -> float:
        # theta(0) = 0 even for a cliff at zero: no spam excludes nothing.
        if s <= 0:
            return 0.0
        return self.theta_post if s >= self.s_cliff else 0.0


Theta = Union[ConcaveTheta, CliffTheta]


@dataclass(frozen=True)
class SpamParams:
    theta: Theta
    R_x: float
    c_da: float

    def __post_init__(self):
        if not self.R_x >= 0:
            raise DomainError(f"R_x must be >= 0, got {self.R_x}")
        if not self.c_da > 0:
            raise DomainError(f"c_da must be > 0, got {self.c_da}")


def spam_profit(s: float, p: SpamParams) -> float:
    if not s >= 0:
        raise DomainError(f"s must be >= 0, got {s}")
    return p.theta(s) * p.R_x - s * p.c_da


def optimal_spam(p: SpamParams) -> tuple[float, float]:
    """Profit-maximizing spam volume and its profit; ``(0, 0)`` when no attack pays."""
    th = p.theta
    if isinstance(th, ConcaveTheta):
        margin = th.theta_max * th.gamma * p.R_x
        if margin <= p.c_da:
            return 0.0, 0.0
        s = math.log(margin / p.c_da) / th.gamma
        return s, spam_profit(s, p)
    s = th.s_cliff if th.s_cliff > 0 else 0.0
    if s == 0.0:
        # any positive volume reaches the cliff; the supremum is approached as s -> 0
        return (0.0, th.theta_post * p.R_x) if p.R_x > 0 else (0.0, 0.0)
    profit = spam_profit(s, p)
    return (s, profit) if profit > 0 else (0.0, 0.0)


@dataclass(frozen=True)
class OrderingSpamParams:
    f: float
    tau_star: float
    deltas: Sequence[float]
    benefit: Callable[[int], float]
    W: Optional[float] = None

    def __post_init__(self):
        if not self.f > 0:
            raise DomainError(f"f must be > 0, got {self.f}")
        if not self.tau_star >= 0:
            raise DomainError(f"tau_star must be >= 0, got {self.tau_star}")
        if any(not d >= 0 for d in self.deltas):
            raise DomainError("overbids must be >= 0")
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))


def ordering_spam_cost(K: int, p: OrderingSpamParams) -> float:
    """Cost of pushing the target ``K`` positions back."""
    if K < 0:
        raise DomainError(f"K must be >= 0, got {K}")
    if K > len(p.deltas):
        raise InsufficientDeltas(f"need {K} overbids, have {len(p.deltas)}")
    return K * (p.f + p.tau_star) + math.fsum(p.deltas[:K])


def max_profitable_advance(p: OrderingSpamParams, K_max: int) -> int | None:
    """Largest ``K <= K_max`` whose benefit strictly exceeds its cost."""
    best = None
    cost = 0.0
    for K in range(1, K_max + 1):
        if K > len(p.deltas):
            raise InsufficientDeltas(f"need {K} overbids, have {len(p.deltas)}")
        cost += p.f + p.tau_star + p.deltas[K - 1]
        if p.benefit(K) > cost:
            best = K
        if p.W is not None and cost >= p.W:
            # cost only grows and the benefit never exceeds W
            break
    return best


@dataclass(frozen=True)
class Homogeneous:
    p: float
    pi: float

    def __post_init__(self):
        _check_proposer(self.p, self.pi)

    @property
    def hit(self) -> float:
        return (1.0 - self.p) * self.pi


def _check_proposer(p: float, pi: float) -> None:
    if not 0.0 <= p < 1.0:
        raise ProbabilityError(f"censor probability {p} outside [0, 1)")
    if not 0.0 < pi <= 1.0:
        raise ProbabilityError(f"PoA probability {pi} outside (0, 1]")


@dataclass(frozen=True)
class QuadraticExternality:
    e2: float

    def __call__(self, k: int) -> float:
        return self.e2 * k * k


@dataclass(frozen=True)
class LinearExternality:
    slope: float

    def __call__(self, k: int) -> float:
        return self.slope * k


@dataclass(frozen=True)
class MultiSubParams:
    """User submitting to ``k`` proposers.  ``proposers`` is either
    ``Homogeneous`` or a list of ``(censor_prob, poa_prob)`` pairs."""

    v: float
    c: float
    proposers: Union[Homogeneous, Sequence[tuple[float, float]]]
    eta: float = 0.0
    e_model: Callable[[int], float] = field(default_factory=lambda: QuadraticExternality(0.0))
    reorder: bool = False

    def __post_init__(self):
        if not (self.v > 0 and self.c >= 0):
            raise DomainError("need v > 0 and c >= 0")
        if not self.eta >= 0:
            raise DomainError(f"eta must be >= 0, got {self.eta}")
        if not isinstance(self.proposers, Homogeneous):
            pairs = tuple((float(a), float(b)) for a, b in self.proposers)
            for a, b in pairs:
                _check_proposer(a, b)
            if self.reorder:
                pairs = tuple(sorted(pairs, key=lambda t: -(1.0 - t[0]) * t[1]))
            object.__setattr__(self, "proposers", pairs)

    def hits(self, k: int) -> list[float]:
        if isinstance(self.proposers, Homogeneous):
            return [self.proposers.hit] * k
        if k > len(self.proposers):
            raise TooManyProposers(f"asked for {k} of {len(self.proposers)} proposers")
        return [(1.0 - a) * b for a, b in self.proposers[:k]]


def inclusion_prob(k: int, p: MultiSubParams) -> float:
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    miss = 1.0
    for h in p.hits(k):
        miss *= 1.0 - h
    return 1.0 - miss


def _inclusion_increments(p: MultiSubParams, K_max: int) -> list[float]:
    """``Psi_{k+1} - Psi_k`` for ``k < K_max``, as ``h_{k+1} prod_{r<=k} (1 - h_r)``
    so no subtraction of nearby values is needed."""
    out = []
    miss = 1.0
    for h in p.hits(K_max):
        out.append(h * miss)
        miss *= 1.0 - h
    return out


Surcharge = Optional[Callable[[int], float]]


def _check_diminishing(incs: list[float], extra: list[float]) -> None:
    for i in range(1, len(incs)):
        if not incs[i] < incs[i - 1]:
            raise NotDiminishing(f"inclusion increment does not decrease at k={i}")
    for i in range(1, len(extra)):
        if extra[i] < extra[i - 1]:
            raise NotDiminishing(f"per-submission surcharge decreases at k={i}")


def private_opt_k(p: MultiSubParams, K_max: int, surcharge: Surcharge = None) -> int:
    """Utility-maximizing number of submissions ``k <= K_max``.

    ``surcharge(k)`` is an extra cost on the ``(k+1)``-th submission and must
    be nondecreasing.  Strictly decreasing inclusion increments make the
    marginal gain strictly decreasing, so the optimum is the number of
    leading submissions with positive marginal gain.
    """
    if K_max < 0:
        raise DomainError(f"K_max must be >= 0, got {K_max}")
    incs = _inclusion_increments(p, K_max)
    extra = [surcharge(k) for k in range(K_max)] if surcharge else [0.0] * K_max
    _check_diminishing(incs, extra)
    k = 0
    for d, x in zip(incs, extra):
        if not p.v * d - p.c - x > 0:
            break
        k += 1
    return k


def social_opt_k(p: MultiSubParams, K_max: int) -> int:
    return private_opt_k(p, K_max, surcharge=lambda k: pigou_surcharge(k, p))


def pigou_surcharge(k: int, p: MultiSubParams) -> float:
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return p.eta * (p.e_model(k + 1) - p.e_model(k))


def private_utility(k: int, p: MultiSubParams) -> float:
    return p.v * inclusion_prob(k, p) - k * p.c


def social_utility(k: int, p: MultiSubParams) -> float:
    return private_utility(k, p) - p.eta * p.e_model(k)
