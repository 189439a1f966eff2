"""Independent verification engines.

Nothing here shares code paths with the Newton solver: value iteration and
the closed-form univariate solver are the cross-checks the test suite holds
the solver against, so they must stay independent of it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoFiniteLfp
from .mps import MonotoneSystem, evaluate
from .ratmath import (
    ONE,
    ZERO,
    den,
    is_perfect_square,
    num,
    rat,
    rational_exceeds_pow2,
    sqrt_bounds,
    sqrt_exact,
    zeros_vector,
)


def value_iterate(sys: MonotoneSystem, k: int) -> list:
    """Exact k-fold value iterate P^k(0).

    Monotone nondecreasing in k, and every coordinate is a certified lower
    bound on the least fixed point.  Values can grow without bound on
    systems with no finite LFP; the caller owns the step budget.
    """
    if k < 0:
        raise ValueError("step count must be >= 0")
    x = zeros_vector(sys.n)
    for _ in range(k):
        x = evaluate(sys, x)
    return x


def zero_set_oracle(sys: MonotoneSystem) -> frozenset:
    """Indices with P^n(0) coordinate exactly 0 == the zero set of the LFP."""
    x = value_iterate(sys, sys.n)
    return frozenset(i for i, xi in enumerate(x) if xi == 0)


def detect_divergence(
    sys: MonotoneSystem,
    qmax_exponent: int,
    max_steps: int = 48,
    bit_budget: int = 1 << 20,
) -> bool:
    """Bounded probe: does value iteration certifiably escape 2**qmax_exponent?

    Value iterates are lower bounds on any finite LFP, so exceeding an upper
    bound that every finite LFP must respect certifies that none exists.
    The probe is one-directional: a False answer proves nothing (the budget
    keeps runaway growth from eating the machine).
    """
    x = zeros_vector(sys.n)
    for _ in range(max_steps):
        x = evaluate(sys, x)
        if any(rational_exceeds_pow2(xi, qmax_exponent) for xi in x):
            return True
        size = sum(num(xi).bit_length() + den(xi).bit_length() for xi in x)
        if size > bit_budget:
            return False
    return False


@dataclass(frozen=True)
class AlgebraicRoot:
    """Exact value (p - sqrt(d)) / q with rational p, q > 0, and d > 0 not a
    perfect square.  Comparisons against rationals reduce to integer sign
    tests, so oracle checks stay exact."""

    p: object
    d: object
    q: object

    def __post_init__(self):
        if self.q <= 0 or self.d < 0:
            raise ValueError("need q > 0 and d >= 0")

    def compare(self, r) -> int:
        """Sign of (self - r) for rational r."""
        t = self.p - rat(r) * self.q  # self >= r  <=>  t >= sqrt(d)
        if t < 0:
            return -1
        tt = t * t
        if tt > self.d:
            return 1
        if tt < self.d:
            return -1
        return 0

    def __lt__(self, r):
        return self.compare(r) < 0

    def __le__(self, r):
        return self.compare(r) <= 0

    def __gt__(self, r):
        return self.compare(r) > 0

    def __ge__(self, r):
        return self.compare(r) >= 0

    def enclosure(self, bits: int = 64):
        lo_s, hi_s = sqrt_bounds(self.d, bits)
        return (self.p - hi_s) / self.q, (self.p - lo_s) / self.q

    def __float__(self):
        lo, hi = self.enclosure(60)
        return float(num(lo + hi)) / float(den(lo + hi)) / 2.0


def univariate_quadratic_lfp(a, b, c):
    """Least non-negative root of x = a*x**2 + b*x + c, exactly.

    Returns a rational when the root is rational and an AlgebraicRoot in
    (p - sqrt(D))/q form otherwise; raises NoFiniteLfp when no non-negative
    fixed point exists (negative discriminant, or both roots negative).
    """
    a, b, c = rat(a), rat(b), rat(c)
    if a < 0 or b < 0 or c < 0:
        raise ValueError("need a, b, c >= 0")
    if a == 0:
        if b < 1:
            return c / (ONE - b)
        if c == 0:
            return ZERO
        raise NoFiniteLfp(f"x = {b}x + {c} has no finite least fixed point")
    disc = (b - ONE) ** 2 - 4 * a * c
    if disc < 0:
        raise NoFiniteLfp("negative discriminant: the parabola never meets the line")
    if c == 0:
        return ZERO  # 0 is a root and no root is smaller than 0
    if b >= 1:
        # With c > 0 both roots share a sign and their sum (1-b)/a is <= 0.
        raise NoFiniteLfp("both fixed points are negative")
    if is_perfect_square(disc):
        return ((ONE - b) - sqrt_exact(disc)) / (2 * a)
    return AlgebraicRoot(p=ONE - b, d=disc, q=2 * a)
