"""Exact arithmetic: rationals, dyadic fixed-point values, and dense
rational linear algebra.

Every certificate in this package rests on intermediate values being exact,
so this module offers no floating-point escape hatch.  Rationals are
arbitrary-precision fractions kept in lowest terms; gmpy2's ``mpq`` is used
when present (same semantics as ``fractions.Fraction``, much faster
normalization), with a pure-stdlib fallback.  All values are immutable and
all functions are pure, so everything here is safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import isqrt
from typing import Sequence

from .errors import SingularMatrix

try:
    from gmpy2 import mpq as Rat

    RAT_BACKEND = "gmpy2"
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as Rat

    RAT_BACKEND = "fractions"

ZERO = Rat(0)
ONE = Rat(1)
HALF = Rat(1, 2)

_RAT_RE = re.compile(r"^(-?\d+)(?:/([1-9][0-9]*))?$")


def rat(value, denominator=None):
    """Coerce to an exact rational.

    Accepts ints, rationals, ``"p"`` / ``"p/q"`` strings, and an optional
    explicit denominator.  Floats are deliberately rejected: a binary float
    smuggled into a certificate would silently change the input.
    """
    if denominator is not None:
        return Rat(value, denominator)
    if isinstance(value, str):
        return parse_rat(value)
    if isinstance(value, float):
        raise ValueError("floats are not accepted; pass an exact rational")
    return Rat(value)


def parse_rat(text: str):
    """Parse the strict wire form ``"p"`` or ``"p/q"`` (decimal digits only)."""
    match = _RAT_RE.match(text.strip())
    if match is None:
        raise ValueError(f"not a rational literal: {text!r}")
    p = int(match.group(1))
    q = int(match.group(2)) if match.group(2) else 1
    return Rat(p, q)


def rat_str(q) -> str:
    """Serialize as ``"p/q"``, or just ``"p"`` when the denominator is 1."""
    return str(q)


def num(q) -> int:
    return int(q.numerator)


def den(q) -> int:
    return int(q.denominator)


def ceil_log2(q) -> int:
    """Smallest integer L with q <= 2**L, computed exactly.

    Used to over-approximate the logarithms in parameter formulas: replacing
    log2(x) by ceil_log2(x) never rounds a certificate in the unsafe
    direction, and is tight on exact powers of two.
    """
    if q <= 0:
        raise ValueError("ceil_log2 requires a positive argument")
    a, b = num(q), den(q)
    # a/b > 2**(bitlen(a) - bitlen(b) - 1) always, so start just below and
    # step up; at most two increments are needed.
    level = a.bit_length() - b.bit_length() - 1
    while not _le_pow2(a, b, level):
        level += 1
    return level


def _le_pow2(a: int, b: int, level: int) -> bool:
    """a/b <= 2**level for positive integers a, b."""
    if level >= 0:
        return a <= (b << level)
    return (a << -level) <= b


def rational_exceeds_pow2(q, exponent: int) -> bool:
    """Exact test of q > 2**exponent.

    Safe for astronomically large exponents: bit-length comparisons decide
    all but a one-bit window, so 2**exponent is never materialized unless it
    is no larger than q itself.
    """
    if q <= 0:
        return False
    a, b = num(q), den(q)
    gap = a.bit_length() - b.bit_length()  # log2(q) lies in (gap-1, gap+1)
    if exponent <= gap - 1:
        return True
    if exponent >= gap + 1:
        return False
    # exponent == gap: compare a with b * 2**gap; the shifted side has the
    # same bit length as an existing operand, so this stays cheap.
    if gap >= 0:
        return a > (b << gap)
    return (a << -gap) > b


def is_perfect_square(q) -> bool:
    """Whether q is the square of a rational (q in lowest terms)."""
    if q < 0:
        return False
    p, s = num(q), den(q)
    return isqrt(p) ** 2 == p and isqrt(s) ** 2 == s


def sqrt_exact(q):
    """Exact square root of a perfect rational square."""
    p, s = num(q), den(q)
    return Rat(isqrt(p), isqrt(s))


def sqrt_upper(q):
    """A rational upper bound on sqrt(q), exact when q is a perfect square."""
    if q < 0:
        raise ValueError("negative radicand")
    p, s = num(q), den(q)
    r = isqrt(p * s)
    if r * r == p * s:
        return Rat(r, s)
    return Rat(r + 1, s)


def sqrt_bounds(q, bits: int = 64):
    """Rational bracket (lo, hi) with lo <= sqrt(q) <= hi and hi - lo <= 2**-bits."""
    if q < 0:
        raise ValueError("negative radicand")
    p, s = num(q), den(q)
    r = isqrt((p << (2 * bits)) * s)
    denom = s << bits
    return Rat(r, denom), Rat(r + 1, denom)


@dataclass(frozen=True)
class Dyadic:
    """Exact value ``mantissa * 2**-scale`` on the 2**-scale grid.

    Kept distinct from Rational so that "is a multiple of 2**-h" is a fact
    of the type, not something to re-check by value inspection.
    """

    mantissa: int
    scale: int

    def __post_init__(self):
        if self.scale < 0:
            raise ValueError("scale must be non-negative")

    def value(self):
        return Rat(self.mantissa, 1 << self.scale)

    def shifted_left(self, bits: int) -> "Dyadic":
        """Exact multiplication by 2**bits (same grid)."""
        return Dyadic(self.mantissa << bits, self.scale)


def round_down_dyadic(v, h: int) -> Dyadic:
    """Largest multiple of 2**-h that is <= max(v, 0)."""
    if h < 1:
        raise ValueError("rounding parameter h must be >= 1")
    if v <= 0:
        return Dyadic(0, h)
    return Dyadic((num(v) << h) // den(v), h)


def dyadic_exceeds_pow2(d: Dyadic, exponent: int) -> bool:
    """Exact test of d > 2**exponent without materializing the threshold."""
    m = d.mantissa
    if m <= 0:
        return False
    total = exponent + d.scale  # d > 2**exponent  <=>  m > 2**total
    top = m.bit_length() - 1
    if top > total:
        return True
    if top < total:
        return False
    return (m & (m - 1)) != 0  # m has 2**total as its top bit; more bits => greater


# --- dense rational linear algebra -------------------------------------------
#
# RVector / RMatrix are plain lists (rows as lists); dimensions are validated
# at the entry points that need them.  At the sizes this solver meets
# (components of a decomposed system) dense exact elimination is the right
# tool; sparse solvers are out of scope.

RVector = list
RMatrix = list


def zeros_vector(n: int) -> list:
    return [ZERO] * n


def ones_vector(n: int) -> list:
    return [ONE] * n


def identity_minus(b: Sequence[Sequence]) -> list:
    """I - B for a square matrix B."""
    n = len(b)
    out = []
    for i in range(n):
        row = [-x for x in b[i]]
        row[i] = ONE + row[i]
        out.append(row)
    return out


def mat_vec_mul(a: Sequence[Sequence], x: Sequence) -> list:
    out = []
    for row in a:
        acc = ZERO
        for coeff, xv in zip(row, x):
            if coeff != 0 and xv != 0:
                acc = acc + coeff * xv
        out.append(acc)
    return out


def vec_sub(a: Sequence, b: Sequence) -> list:
    return [x - y for x, y in zip(a, b)]


def inf_norm(v: Sequence):
    worst = ZERO
    for q in v:
        mag = -q if q < 0 else q
        if mag > worst:
            worst = mag
    return worst


def solve_linear(a: Sequence[Sequence], b: Sequence) -> list:
    """Exact solution of A x = b for square A by rational Gaussian elimination.

    The pivot is the first row with a nonzero entry in the current column:
    exact arithmetic needs no magnitude-based pivoting, and a fixed rule
    keeps runs reproducible.  Raises SingularMatrix when a column has no
    pivot, which during Newton iteration signals an undefined iterate.
    """
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    if len(b) != n:
        raise ValueError("right-hand side has wrong dimension")
    m = [list(row) for row in a]
    rhs = list(b)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {col}")
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        lead = m[col][col]
        for r in range(col + 1, n):
            if m[r][col] == 0:
                continue
            factor = m[r][col] / lead
            m[r][col] = ZERO
            for c in range(col + 1, n):
                if m[col][c] != 0:
                    m[r][c] = m[r][c] - factor * m[col][c]
            rhs[r] = rhs[r] - factor * rhs[col]
    x = zeros_vector(n)
    for r in range(n - 1, -1, -1):
        acc = rhs[r]
        row = m[r]
        for c in range(r + 1, n):
            if row[c] != 0 and x[c] != 0:
                acc = acc - row[c] * x[c]
        x[r] = acc / row[r]
    return x
