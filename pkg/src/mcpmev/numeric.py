"""Root finding, bounded maximization, quadrature and reproducible random streams."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NoBracket, NoConvergence

ScalarFn = Callable[[float], float]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0 or self.abs_tol + self.rel_tol <= 0:
            raise DomainError("need abs_tol, rel_tol >= 0 with abs_tol + rel_tol > 0")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")

    def width(self, x: float) -> float:
        return self.abs_tol + self.rel_tol * abs(x)


DEFAULT_TOL = Tolerance()
# Used where a root must be located to machine precision (e.g. inverting M).
TIGHT_TOL = Tolerance(abs_tol=1e-15, rel_tol=1e-15, max_iter=400)


def bisect(f: ScalarFn, lo: float, hi: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Locate a sign change of ``f`` inside ``[lo, hi]`` by interval halving.

    Stops when the bracket is narrower than ``tol.width`` at the midpoint or
    when floating point can no longer split it.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoBracket(f"f({lo})={flo} and f({hi})={fhi} share a sign")
    for _ in range(tol.max_iter):
        mid = lo + (hi - lo) / 2.0
        if mid <= lo or mid >= hi or hi - lo <= tol.width(mid):
            return mid
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    raise NoConvergence(f"bisection did not converge in {tol.max_iter} iterations")


def maximize_scalar(
    f: ScalarFn, lo: float, hi: float, tol: Tolerance = DEFAULT_TOL
) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``f`` on ``[lo, hi]``.

    Ties move the bracket left, so a constant function returns ``lo``.
    Returns ``(argmax, max)``.
    """
    if not lo <= hi:
        raise DomainError(f"need lo <= hi, got [{lo}, {hi}]")
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(tol.max_iter):
        if b - a <= tol.width(0.5 * (a + b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    else:
        raise NoConvergence(f"golden section did not converge in {tol.max_iter} iterations")
    x, fx = (c, fc) if fc >= fd else (d, fd)
    # Boundary maxima are reported exactly.
    flo, fhi = f(lo), f(hi)
    if flo >= fx and flo >= fhi:
        return lo, flo
    if fhi > fx:
        return hi, fhi
    return x, fx


def integrate(
    f: ScalarFn,
    lo: float,
    hi: float,
    tol: Tolerance = DEFAULT_TOL,
    panels: int = 16,
    max_depth: int = 50,
) -> float:
    """Adaptive Simpson quadrature with Richardson correction.

    The range is first cut into ``panels`` equal pieces so that narrow
    features are not missed by the initial five-point stencil.
    """
    if hi == lo:
        return 0.0
    if hi < lo:
        return -integrate(f, hi, lo, tol, panels, max_depth)
    eps = max(tol.abs_tol, 1e-15) / panels
    total = 0.0
    edges = np.linspace(lo, hi, panels + 1)
    budget = tol.max_iter * 1000
    for a, b in zip(edges[:-1], edges[1:]):
        a, b = float(a), float(b)
        fa, fb = f(a), f(b)
        m = 0.5 * (a + b)
        fm = f(m)
        whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
        stack = [(a, b, fa, fm, fb, whole, eps, 0)]
        while stack:
            a, b, fa, fm, fb, whole, e, depth = stack.pop()
            budget -= 1
            if budget < 0:
                raise NoConvergence("adaptive Simpson exceeded its evaluation budget")
            m = 0.5 * (a + b)
            lm, rm = 0.5 * (a + m), 0.5 * (m + b)
            flm, frm = f(lm), f(rm)
            left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
            right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
            delta = left + right - whole
            if abs(delta) <= 15.0 * e or b - a <= 1e-14 * max(1.0, abs(a)):
                total += left + right + delta / 15.0
            elif depth >= max_depth:
                raise NoConvergence(f"adaptive Simpson hit depth {max_depth} on [{a}, {b}]")
            else:
                stack.append((a, m, fa, flm, fm, left, 0.5 * e, depth + 1))
                stack.append((m, b, fm, frm, fb, right, 0.5 * e, depth + 1))
    return total


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by ``(seed, stream_id)``.

    Backed by Philox-4x64, whose output is a pure function of the 128-bit key
    and counter, so a given key reproduces the same draws on any platform.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= v <= _MASK64:
                raise DomainError(f"{name} must be a 64-bit unsigned integer, got {v}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def spawn(self, index: int) -> "RngStream":
        """Child stream ``index``; children of distinct indices are distinct keys."""
        return RngStream(self.seed, _splitmix64(self.stream_id ^ _splitmix64(index)))
