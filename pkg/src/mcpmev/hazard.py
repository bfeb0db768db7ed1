"""Delay economics of a single transaction under pre-emption risk.

A proposer holding a transaction with tip ``tau`` may delay it by ``alpha``
ticks to harvest MEV that accrues at rate ``A k e^{-k s}`` while the
opportunity survives a pre-emption hazard ``lam``.  The tip is discounted by
a separate hazard ``delta`` (equal to ``lam`` in the one-hazard model).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import DomainError, OutOfRegime, ProbabilityError
from .numeric import TIGHT_TOL, Tolerance, bisect


@dataclass(frozen=True)
class HazardParams:
    A: float
    k: float
    lam: float
    delta: float | None = None

    def __post_init__(self):
        if self.delta is None:
            object.__setattr__(self, "delta", self.lam)
        for name in ("A", "k", "lam"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and > 0, got {v}")
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise DomainError(f"delta must be finite and >= 0, got {self.delta}")

    @property
    def one_hazard(self) -> bool:
        return self.delta == self.lam

    @property
    def saturation(self) -> float:
        """Accrual limit ``Ak/(k+lam)``, also ``M(0)``."""
        return self.A * self.k / (self.k + self.lam)


@dataclass(frozen=True)
class DelayChoice:
    """Optimal delay for one tip.

    ``alpha`` is None when the supremum is only approached as the delay grows
    without bound (``saturated``); ``value`` is then that limiting payoff.
    """

    alpha: float | None
    value: float
    saturated: bool = False


class Action(Enum):
    DROP = "drop"
    KEEP = "keep"


@dataclass(frozen=True)
class ProposerPolicyInput:
    tau: float
    beta: float

    def __post_init__(self):
        for name in ("tau", "beta"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class PolicyAction:
    kind: Action
    alpha: float | None = None
    saturated: bool = False


def _check_nonneg(name: str, v: float) -> None:
    if not v >= 0:
        raise DomainError(f"{name} must be >= 0, got {v}")


def accrual(alpha: float, p: HazardParams) -> float:
    """Expected MEV harvested by delaying ``alpha`` ticks."""
    _check_nonneg("alpha", alpha)
    return p.saturation * -math.expm1(-(p.k + p.lam) * alpha)


def u_mev(alpha: float, tau: float, p: HazardParams) -> float:
    """Per-transaction payoff: accrual plus the hazard-discounted tip."""
    _check_nonneg("tau", tau)
    return accrual(alpha, p) + tau * math.exp(-p.delta * alpha)


def optimal_delay(tau: float, p: HazardParams) -> DelayChoice:
    _check_nonneg("tau", tau)
    c = p.saturation
    s = p.k + p.lam
    if p.delta >= s:
        # Tip decays at least as fast as accrual saturates: U lies between
        # tau and c, so the best is either now or never.
        if tau >= c:
            return DelayChoice(0.0, tau)
        return DelayChoice(None, c, saturated=True)
    if p.delta == 0.0:
        return DelayChoice(None, c + tau, saturated=True)
    if tau == 0.0:
        return DelayChoice(None, c, saturated=True)
    if p.delta * tau >= p.A * p.k:
        return DelayChoice(0.0, tau)
    alpha = math.log(p.A * p.k / (p.delta * tau)) / (s - p.delta)
    return DelayChoice(alpha, envelope(tau, p))


def envelope(tau: float, p: HazardParams) -> float:
    """Delay envelope ``M(tau) = sup_alpha u_mev(alpha, tau)``."""
    _check_nonneg("tau", tau)
    c = p.saturation
    s = p.k + p.lam
    if p.delta == 0.0:
        return c + tau
    r = p.delta * tau / (p.A * p.k)
    if p.delta < s and 0.0 < r < 1.0:
        g = s - p.delta
        return c * (1.0 - r ** (s / g)) + tau * r ** (p.delta / g)
    return max(tau, c)


def optimal_delay_one_hazard(tau: float, p: HazardParams) -> float | None:
    """Single-hazard maximizer ``(1/k) ln(Ak/(lam tau))``; ignores ``delta``."""
    _check_nonneg("tau", tau)
    if tau == 0.0:
        return None
    if tau >= p.A * p.k / p.lam:
        return 0.0
    return math.log(p.A * p.k / (p.lam * tau)) / p.k


def envelope_one_hazard(tau: float, p: HazardParams) -> float:
    """Single-hazard closed form of ``M``; ignores ``delta``."""
    _check_nonneg("tau", tau)
    c = p.saturation
    r = p.lam * tau / (p.A * p.k)
    if 0.0 < r < 1.0:
        return c * (1.0 - r ** (1.0 + p.lam / p.k)) + tau * r ** (p.lam / p.k)
    return max(tau, c)


def immediate_threshold(p: HazardParams) -> float:
    """Smallest tip at which immediate inclusion is optimal."""
    if p.delta == 0.0:
        return math.inf
    if p.delta >= p.k + p.lam:
        return p.saturation
    return p.A * p.k / p.delta


def drop_cutoff(beta: float, p: HazardParams, tol: Tolerance = TIGHT_TOL) -> float:
    """Tip ``tau_d`` with ``M(tau_d) = beta``; zero when ``beta <= M(0)``."""
    _check_nonneg("beta", beta)
    if beta <= envelope(0.0, p):
        return 0.0
    hi = max(beta, 1.0)
    while envelope(hi, p) < beta:
        hi *= 2.0
    return bisect(lambda t: envelope(t, p) - beta, 0.0, hi, tol)


def proposer_policy(inp: ProposerPolicyInput, p: HazardParams) -> PolicyAction:
    # tau < tau_d  <=>  M(tau) < beta, by strict monotonicity of M; comparing
    # envelopes avoids a spurious drop when tau sits exactly on the cutoff.
    if envelope(inp.tau, p) < inp.beta:
        return PolicyAction(Action.DROP)
    choice = optimal_delay(inp.tau, p)
    return PolicyAction(Action.KEEP, choice.alpha, choice.saturated)


@dataclass(frozen=True)
class ReactionSpec:
    incl_prob: float
    pre_prob: float
    post_prob: float
    delta_pre: float
    delta_post: float


def interblock_total(reactions: Iterable[ReactionSpec]) -> float:
    """Expected inter-block MEV of conflict-free reactions."""
    total = 0.0
    for r in reactions:
        for name in ("incl_prob", "pre_prob", "post_prob"):
            v = getattr(r, name)
            if not 0.0 <= v <= 1.0:
                raise ProbabilityError(f"{name}={v} outside [0, 1]")
        if r.pre_prob + r.post_prob > 1.0 + 1e-12:
            raise ProbabilityError("pre_prob + post_prob exceeds 1")
        total += r.incl_prob * (r.pre_prob * r.delta_pre + r.post_prob * r.delta_post)
    return total


@dataclass(frozen=True)
class ConcurrencyModel:
    """Power-law dependence of accrual and hazard on the proposer count:
    ``k(n) = k0 n^a`` and ``lam(n) = lam0 n^b``."""

    A: float
    k0: float
    a: float
    lam0: float
    b: float

    def __post_init__(self):
        if not (self.A > 0 and self.k0 > 0 and self.lam0 > 0):
            raise DomainError("A, k0, lam0 must be > 0")

    def k(self, n: float) -> float:
        return self.k0 * n**self.a

    def dk(self, n: float) -> float:
        return self.a * self.k0 * n ** (self.a - 1.0)

    def lam(self, n: float) -> float:
        return self.lam0 * n**self.b

    def dlam(self, n: float) -> float:
        return self.b * self.lam0 * n ** (self.b - 1.0)

    def hazard(self, n: float) -> HazardParams:
        return HazardParams(self.A, self.k(n), self.lam(n))


def alpha_star_n(n: float, tau: float, m: ConcurrencyModel, clip: bool = True) -> float:
    """``alpha*(tau; n)``; with ``clip=False`` the log formula is extended past
    the boundary (it turns negative there)."""
    if tau <= 0:
        raise DomainError("tau must be > 0")
    k, lam = m.k(n), m.lam(n)
    a = math.log(m.A * k / (lam * tau)) / k
    return max(a, 0.0) if clip else a


def delay_sensitivity(n: float, tau: float, m: ConcurrencyModel) -> float:
    """``d alpha*/dn`` on the interior region (boundary included)."""
    if n <= 0 or tau <= 0:
        raise DomainError("n and tau must be > 0")
    k, lam = m.k(n), m.lam(n)
    log_ratio = math.log(m.A * k / (lam * tau))
    if log_ratio < -1e-12:
        raise OutOfRegime(f"A k(n) < lam(n) tau at n={n}: alpha* is pinned at 0")
    kp, lp = m.dk(n), m.dlam(n)
    return -kp / k**2 * max(log_ratio, 0.0) + (kp / k - lp / lam) / k


def _delay_dominates(n: float, tau: float, beta: float, m: ConcurrencyModel) -> bool:
    h = m.hazard(n)
    if envelope(tau, h) < beta:
        return False
    choice = optimal_delay(tau, h)
    return choice.saturated or (choice.alpha is not None and choice.alpha > 0.0)


def dominance_threshold(
    m: ConcurrencyModel,
    tau: float,
    beta: float,
    n_range: Sequence[float],
    step: float = 0.1,
) -> float | None:
    """First grid point ``n`` where keeping-with-delay becomes optimal for ``tau``
    although it was not at the start of ``n_range``; None if it never does."""
    n_lo, n_hi = n_range
    if not (0 < n_lo <= n_hi) or step <= 0:
        raise DomainError("need 0 < n_lo <= n_hi and step > 0")
    if _delay_dominates(n_lo, tau, beta, m):
        return None
    count = int(math.floor((n_hi - n_lo) / step + 1e-9))
    for i in range(1, count + 1):
        n = n_lo + i * step
        if _delay_dominates(n, tau, beta, m):
            return n
    return None
