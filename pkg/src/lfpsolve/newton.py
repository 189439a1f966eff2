"""Single Newton steps, the rounded-down Newton loop, and per-component
certified parameters.

One Newton iteration at z is z + (I - B(z))^{-1} (P(z) - z), computed
exactly; the rounded loop then snaps every coordinate down to the 2**-h
grid (clamping at 0), which keeps iterate bit-sizes linear in h instead of
doubling per step, while every iterate remains a lower bound on the least
fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DivergenceCertified
from .mps import MonotoneSystem, eval_jacobian, evaluate
from .ratmath import (
    ONE,
    Dyadic,
    ceil_log2,
    dyadic_exceeds_pow2,
    identity_minus,
    inf_norm,
    rat,
    round_down_dyadic,
    solve_linear,
    vec_sub,
)


@dataclass(frozen=True)
class RnmConfig:
    """Rounding parameter h and iteration count g.

    Certified runs use g >= h - 1; the loop itself only requires both to be
    at least 1.
    """

    h: int
    g: int

    def __post_init__(self):
        if self.h < 1 or self.g < 1:
            raise ValueError("need h >= 1 and g >= 1")


@dataclass(frozen=True)
class TraceRecord:
    k: int
    iterate: tuple  # Dyadic per coordinate
    residual: object  # ||P(x) - x||_inf, diagnostics only


@dataclass(frozen=True)
class IterationTrace:
    records: tuple


def newton_step(sys: MonotoneSystem, z) -> list:
    """Exact Newton operator at z for a quadratic system.

    Raises SingularMatrix (from the linear solve) when I - B(z) has no
    inverse, i.e. the iteration is undefined at z.
    """
    jac = eval_jacobian(sys, z)
    rhs = vec_sub(evaluate(sys, z), z)
    delta = solve_linear(identity_minus(jac), rhs)
    return [zi + di for zi, di in zip(z, delta)]


def _record(sys: MonotoneSystem, k: int, iterate) -> TraceRecord:
    values = [d.value() for d in iterate]
    residual = inf_norm(vec_sub(evaluate(sys, values), values))
    return TraceRecord(k, tuple(iterate), residual)


def run_rnm(
    sys: MonotoneSystem,
    cfg: RnmConfig,
    divergence_exponent: int | None = None,
):
    """Rounded-down Newton from the all-zero vector.

    Each step computes the exact Newton iterate, then rounds every
    coordinate down to the largest non-negative multiple of 2**-h.  Returns
    the final iterate and the full trace (residuals are recorded for
    diagnostics; they are never a stopping criterion).

    When ``divergence_exponent`` is given, any iterate coordinate exceeding
    2**divergence_exponent raises DivergenceCertified: iterates of a system
    with a finite LFP below that bound can never get there.
    """
    n = sys.n
    x = tuple(Dyadic(0, cfg.h) for _ in range(n))
    records = [_record(sys, 0, x)]
    for k in range(1, cfg.g + 1):
        values = [d.value() for d in x]
        nxt = newton_step(sys, values)
        rounded = tuple(round_down_dyadic(v, cfg.h) for v in nxt)
        if rounded == x:
            # The rounded step is a deterministic map, so a repeated iterate
            # is pinned forever: x^[g] equals this iterate exactly and the
            # remaining iterations can be skipped without changing anything.
            break
        x = rounded
        if divergence_exponent is not None:
            for d in x:
                if dyadic_exceeds_pow2(d, divergence_exponent):
                    raise DivergenceCertified(
                        f"iterate {k} exceeds the q*_max bound 2**{divergence_exponent}; "
                        "no finite least fixed point below it exists"
                    )
        records.append(_record(sys, k, x))
    return x, IterationTrace(tuple(records))


def certify_params_scc(n: int, alpha, epsilon) -> RnmConfig:
    """Certified (h, g) for one strongly connected system with LFP <= 1.

    h = ceil(2 + n*log2(1/alpha) + log2(1/epsilon)) with each logarithm
    over-approximated by its exact integer ceiling (never under), g = h - 1.
    With these parameters the final rounded iterate is within epsilon of the
    component's least fixed point.
    """
    alpha = rat(alpha)
    epsilon = rat(epsilon)
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    if n < 1:
        raise ValueError("need at least one variable")
    h = 2 + n * ceil_log2(ONE / alpha) + ceil_log2(ONE / epsilon)
    return RnmConfig(h=h, g=h - 1)
