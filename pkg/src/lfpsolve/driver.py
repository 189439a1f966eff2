"""The decomposed solver: LFP bounds, certified parameter selection,
rescaling, bottom-up per-component Newton runs, and perturbation
diagnostics.

Certified mode picks the rounding parameter h and iteration count g from
the convergence theorems, using only quantities it can bound soundly (all
logarithms over-approximated by exact integer ceilings), and guarantees
||q* - approx||_inf <= epsilon with approx <= q* coordinatewise.  Adaptive
mode trades the certificate for feasible parameters: it doubles h until two
consecutive levels agree and says so in the report status.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .decomposition import Decomposition, Scc, build_graph, decompose
from .errors import DegreeTooHigh, DivergenceCertified, ParamsInfeasible
from .mps import (
    Monomial,
    MonotoneSystem,
    c_min,
    clean,
    encoding_size,
    norm_p_one,
    to_snf,
)
from .newton import IterationTrace, RnmConfig, newton_step, run_rnm
from .oracle import detect_divergence, value_iterate
from .ratmath import (
    HALF,
    ONE,
    ZERO,
    Dyadic,
    ceil_log2,
    rat,
    rational_exceeds_pow2,
    round_down_dyadic,
    sqrt_upper,
    zeros_vector,
)

DEFAULT_MAX_H = 1_000_000

_ENCODING_NOTE = (
    "|P| = per-monomial numerator/denominator bit lengths plus per-exponent "
    "index/exponent bit lengths; one admissible convention, and every "
    "theorem-derived parameter in this report depends on it"
)


@dataclass(frozen=True)
class LfpBounds:
    """Certified two-sided bounds on the least fixed point's coordinates.

    The upper bound is kept as a binary exponent (value 2**qmax_exponent);
    the worst-case formula is astronomically large, so comparisons against
    it are done in exponent space.
    """

    qmin_lower: object
    qmin_source: str
    qmax_exponent: int
    qmax_source: str

    def __post_init__(self):
        if self.qmin_lower <= 0:
            raise ValueError("qmin_lower must be positive")
        if rational_exceeds_pow2(self.qmin_lower, self.qmax_exponent):
            raise ValueError("lower bound exceeds upper bound")


@dataclass(frozen=True)
class DriverParams:
    alpha: object
    h: int
    g: int
    u: int
    mode: str


@dataclass(frozen=True)
class SccRun:
    names: tuple
    nonlinear: bool
    iterations: int
    trace: IterationTrace | None


@dataclass(frozen=True)
class SolveReport:
    approximation: tuple  # Dyadic per original variable, zeros reinserted
    names: tuple
    params: DriverParams
    bounds: LfpBounds
    scc_runs: tuple
    status: str  # "certified-eps" | "adaptive-heuristic"
    epsilon: object
    info: dict

    def values(self) -> list:
        return [d.value() for d in self.approximation]


@dataclass(frozen=True)
class SolveOptions:
    mode: str = "certified"  # "certified" | "adaptive"
    assume_probabilistic: bool = False
    use_snf: bool = True
    h_override: int | None = None
    g_override: int | None = None
    max_h: int = DEFAULT_MAX_H
    keep_traces: bool = False
    jobs: int = 1
    qmax_exponent_assert: int | None = None  # user-asserted bound on log2(q*_max)
    value_iteration_cap: int = 12  # exact steps allowed for the q*_min bound
    probe_steps: int = 48  # divergence probe budget


# --- bounds on the least fixed point -----------------------------------------

_POWER_BIT_BUDGET = 1 << 21


def _qmin_candidates(sys: MonotoneSystem, value_iteration_cap: int):
    """Certified lower bounds on q*_min of a cleaned system, with source tags."""
    n = sys.n
    candidates = []
    cmin = min(ONE, c_min(sys))
    exponent = (1 << n) - 1 if n <= 60 else None
    if exponent is not None:
        coeff_bits = max(
            int(cmin.numerator).bit_length(), int(cmin.denominator).bit_length()
        )
        if exponent * coeff_bits <= _POWER_BIT_BUDGET:
            candidates.append((cmin**exponent, "worst-case-formula"))
        bits = encoding_size(sys)
        if exponent * bits <= _POWER_BIT_BUDGET:
            # Dominated by the bound above (c_min >= 2**-|P|); kept for traceability.
            candidates.append((rat(1, 1 << (bits * exponent)), "worst-case-formula"))
    if n <= value_iteration_cap:
        iterate = value_iterate(sys, n)
        floor = min(iterate) if iterate else ONE
        if floor > 0:
            candidates.append((floor, "value-iteration"))
    return candidates


def qmin_lower_bound(sys: MonotoneSystem, value_iteration_cap: int = 12):
    """Best available certified lower bound on the smallest LFP coordinate.

    Takes the max of: min{1, c_min}**(2**n - 1); the encoding-size worst
    case 2**(-|P| (2**n - 1)); and the smallest coordinate of the n-fold
    value iterate (positive after cleaning, and always <= q*).
    """
    candidates = _qmin_candidates(sys, value_iteration_cap)
    if not candidates:
        raise ParamsInfeasible(
            "no computable lower bound on q*_min at this size; "
            "raise the value-iteration cap"
        )
    return max(value for value, _ in candidates)


def qmax_upper_exponent(sys: MonotoneSystem, assume_probabilistic: bool) -> int:
    """log2 of a certified upper bound on the largest LFP coordinate.

    Termination-probability systems are simply bounded by 1; otherwise the
    worst-case root-magnitude bound 2**(2(n+1)(|P| + 2(n+1) log(2n+2)) 5**n)
    applies, with the inner logarithm over-approximated by its ceiling.
    """
    if assume_probabilistic:
        return 0
    n = sys.n
    bits = encoding_size(sys)
    return 2 * (n + 1) * (bits + 2 * (n + 1) * ceil_log2(rat(2 * n + 2))) * 5**n


def compute_bounds(sys: MonotoneSystem, options: SolveOptions) -> LfpBounds:
    candidates = _qmin_candidates(sys, options.value_iteration_cap)
    if not candidates:
        raise ParamsInfeasible("no computable lower bound on q*_min at this size")
    # on ties prefer the value-iteration tag; it is the bound that actually binds
    qmin, source = max(candidates, key=lambda pair: (pair[0], pair[1] == "value-iteration"))
    if options.qmax_exponent_assert is not None:
        exponent, tag = options.qmax_exponent_assert, "user-asserted"
    elif options.assume_probabilistic:
        exponent, tag = 0, "probability-flag"
    else:
        exponent, tag = qmax_upper_exponent(sys, False), "worst-case-formula"
    if rational_exceeds_pow2(qmin, exponent):
        # The certified lower bound already escapes the claimed upper bound,
        # which can only happen when no finite LFP lies below it.
        raise DivergenceCertified(
            f"certified q*_min lower bound {qmin} exceeds the asserted "
            f"q*_max bound 2**{exponent}"
        )
    return LfpBounds(qmin, source, exponent, tag)


# --- rescaling ----------------------------------------------------------------


def rescale(sys: MonotoneSystem, u: int) -> MonotoneSystem:
    """The system x = 2**-u P(2**u x), whose LFP is 2**-u q*.

    Concretely the coefficient of every degree-k monomial is multiplied by
    2**(u(k-1)); the variable support is untouched, so the decomposition of
    the original system carries over verbatim.
    """
    if u < 0:
        raise ValueError("u must be non-negative")
    if u == 0:
        return sys
    equations = []
    for terms in sys.equations:
        scaled = []
        for mono in terms:
            shift = u * (mono.degree - 1)
            if shift >= 0:
                coeff = mono.coeff * (1 << shift)
            else:
                coeff = mono.coeff / (1 << -shift)
            scaled.append(Monomial(coeff, mono.exponents))
        equations.append(tuple(scaled))
    return MonotoneSystem(sys.names, tuple(equations))


# --- perturbation diagnostics ---------------------------------------------------


def perturbation_bound(scc_sys: MonotoneSystem, alpha, norm_p1, dy, linear: bool):
    """Predicted LFP shift of a component when its inputs move down by dy.

    Nonlinear components get sqrt(4 n alpha^-(3n+1) ||P(1,1)|| dy) (square
    root over-approximated by a rational upper bound); linear components get
    2 n alpha^-(n+2) ||P(1,1)|| dy.
    """
    alpha, norm_p1, dy = rat(alpha), rat(norm_p1), rat(dy)
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    if dy < 0:
        raise ValueError("dy must be non-negative")
    if dy == 0:
        return ZERO
    n = scc_sys.n
    inv = ONE / alpha
    if linear:
        return 2 * n * inv ** (n + 2) * norm_p1 * dy
    return sqrt_upper(4 * n * inv ** (3 * n + 1) * norm_p1 * dy)


# --- component-wise rounded Newton ---------------------------------------------


def _scc_subsystem(sys: MonotoneSystem, members: tuple, solved: list) -> MonotoneSystem:
    """Equations of one component with solved lower variables substituted in.

    Monomials touching a lower variable fold its value into the coefficient;
    a zero value kills the whole monomial (never the constant terms).
    """
    local = {v: i for i, v in enumerate(members)}
    equations = []
    for v in members:
        terms = []
        for mono in sys.equations[v]:
            coeff = mono.coeff
            kept = []
            dead = False
            for j, e in mono.exponents:
                if j in local:
                    kept.append((local[j], e))
                    continue
                value = solved[j]
                if value is None:
                    raise AssertionError("dependency solved out of order")
                if value == 0:
                    dead = True
                    break
                coeff = coeff * (value if e == 1 else value**e)
            if not dead:
                terms.append(Monomial(coeff, tuple(kept)))
        equations.append(tuple(terms))
    return MonotoneSystem(tuple(sys.names[v] for v in members), tuple(equations))


def _solve_scc(sub: MonotoneSystem, scc: Scc, h: int, g: int, threshold: int | None):
    if scc.nonlinear:
        final, trace = run_rnm(sub, RnmConfig(h, g), divergence_exponent=threshold)
        return list(final), trace, g
    # Linear component: one exact solve, then round down.
    exact = newton_step(sub, zeros_vector(sub.n))
    for value in exact:
        if value < 0:
            raise DivergenceCertified(
                "linear component has no non-negative fixed point, "
                "so the system has no finite least fixed point"
            )
        if threshold is not None and rational_exceeds_pow2(value, threshold):
            raise DivergenceCertified(
                f"linear component solution exceeds the q*_max bound 2**{threshold}"
            )
    final = [round_down_dyadic(value, h) for value in exact]
    return final, None, 1


def _run_rdnm(
    sys: MonotoneSystem,
    decomp: Decomposition,
    h: int,
    g: int,
    threshold: int | None,
    jobs: int,
    keep_traces: bool,
):
    """Bottom-up rounded decomposed Newton over an already-cleaned system.

    Components whose dependencies are fully solved can run concurrently
    (grouped by height); each writes only its own slots, so scheduling never
    changes the output.
    """
    solved: list = [None] * sys.n
    dyadics: list = [None] * sys.n
    runs = []

    by_height: dict[int, list] = {}
    for scc in decomp.sccs:
        by_height.setdefault(scc.height, []).append(scc)

    def work(scc: Scc):
        sub = _scc_subsystem(sys, scc.vars, solved)
        return _solve_scc(sub, scc, h, g, threshold)

    for height in sorted(by_height):
        group = by_height[height]
        if jobs > 1 and len(group) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(work, group))
        else:
            results = [work(scc) for scc in group]
        for scc, (final, trace, iterations) in zip(group, results):
            for v, d in zip(scc.vars, final):
                dyadics[v] = d
                solved[v] = d.value()
            runs.append(
                SccRun(
                    names=tuple(sys.names[v] for v in scc.vars),
                    nonlinear=scc.nonlinear,
                    iterations=iterations,
                    trace=trace if keep_traces else None,
                )
            )
    return dyadics, tuple(runs)


# --- certified parameter formulas ---------------------------------------------


def _params_q_le_1(n, d, f, alpha, norm_p1, epsilon):
    """Rounding parameter for LFP <= 1: h >= ceil(3 + 2**f (log 1/eps +
    d (log alpha^-(4n+1) + log 16n + log ||P(1)||)))."""
    inner = (
        ceil_log2(ONE / epsilon)
        + d * ((4 * n + 1) * ceil_log2(ONE / alpha) + ceil_log2(rat(16 * n)) + ceil_log2(norm_p1))
    )
    return max(3 + (1 << f) * inner, 2)


def _params_general(n, d, f, u, beta, norm_q1, epsilon):
    """Iteration count for rescaled solving of a system with q*_max <= 2**u:
    g = 2 + ceil(2**f (log 1/eps + d (2u + log alpha'^-(4n+1) + log 16n +
    log ||Q(1)||))) with alpha' = 2**-2u * beta."""
    log_inv_alpha = 2 * u + ceil_log2(ONE / beta)
    inner = (
        ceil_log2(ONE / epsilon)
        + d * (2 * u + (4 * n + 1) * log_inv_alpha + ceil_log2(rat(16 * n)) + ceil_log2(norm_q1))
    )
    return max(2 + (1 << f) * inner, 2 * u + 3)


def _newton_rate_info(n, d, f, bits, epsilon):
    """Input-size-only worst-case iteration schedule, reported for context.

    In the g = kP + cP * log2(1/eps) reading, cP is 2**f and kP collects
    every epsilon-independent term; also reports the assembled worst-case g
    for the requested epsilon.  Only evaluated at sizes where 2**n is a sane
    integer; these numbers are informational and never drive the run.
    """
    if n > 4096:
        return None
    per_level = bits * (1 << n) * (4 * n + 1) + (4 * n + 1) + ceil_log2(rat(16 * n)) + bits
    offset = 2 + (1 << f) * d * per_level
    return {
        "cP": 1 << f,
        "kP": offset,
        "g_worst_case": offset + (1 << f) * ceil_log2(ONE / epsilon),
    }


# --- the solver -----------------------------------------------------------------


def solve(sys: MonotoneSystem, epsilon, options: SolveOptions | None = None) -> SolveReport:
    """Approximate the least fixed point of x = P(x) to within epsilon.

    Pipeline: optional conversion to simple normal form, removal of zero
    variables, SCC decomposition, certified (or adaptive) parameter choice,
    bottom-up rounded Newton, undo of rescaling, reinsertion of zeros, and
    projection back to the original variables.

    Raises SingularMatrix (Newton undefined), DivergenceCertified (no finite
    LFP below the working bound), or ParamsInfeasible (certified h above the
    ceiling).
    """
    options = options or SolveOptions()
    epsilon = rat(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    if options.mode not in ("certified", "adaptive"):
        raise ValueError(f"unknown mode {options.mode!r}")

    snf = to_snf(sys) if options.use_snf else None
    work = snf.system if snf is not None else sys
    if work.degree() > 2:
        raise DegreeTooHigh(
            "system has degree > 2; solve requires a quadratic system "
            "(leave simple-normal-form conversion enabled)"
        )
    cleaned, kept = clean(work)
    removed = [work.names[i] for i in range(work.n) if i not in set(kept)]

    info = {
        "encoding_convention": _ENCODING_NOTE,
        "snf_applied": snf is not None,
        "removed_zero_variables": removed,
    }

    if cleaned.n == 0:
        # Everything was a zero variable; the answer is exact.
        approx = tuple(Dyadic(0, 1) for _ in range(sys.n))
        params = DriverParams(alpha=ONE, h=1, g=1, u=0, mode=options.mode)
        bounds = LfpBounds(ONE, "value-iteration", 0, "probability-flag")
        status = "certified-eps" if options.mode == "certified" else "adaptive-heuristic"
        return SolveReport(approx, tuple(sys.names), params, bounds, (), status, epsilon, info)

    decomp = decompose(build_graph(cleaned), cleaned)
    n, d, f = cleaned.n, decomp.depth, decomp.nonlinear_depth
    bounds = compute_bounds(cleaned, options)
    info.update(
        {
            "encoding_bits": encoding_size(cleaned),
            "variable_count": n,
            "depth": d,
            "nonlinear_depth": f,
            "newton_rate": _newton_rate_info(n, d, f, encoding_size(cleaned), epsilon),
        }
    )

    # Cheap certified divergence probe: value iterates are lower bounds on
    # any finite LFP, so escaping the upper bound settles the question
    # before any expensive parameter choice.
    if bounds.qmax_exponent <= (1 << 20) and detect_divergence(
        cleaned, bounds.qmax_exponent, max_steps=options.probe_steps
    ):
        raise DivergenceCertified(
            f"value iteration escapes the q*_max bound 2**{bounds.qmax_exponent}; "
            "no finite least fixed point below it exists"
        )

    cmin = min(ONE, c_min(cleaned))
    alpha_info = cmin * HALF * min(ONE, bounds.qmin_lower)

    if options.h_override is not None:
        h = options.h_override
        g = options.g_override if options.g_override is not None else max(h - 1, 1)
        params = DriverParams(alpha=alpha_info, h=h, g=g, u=0, mode=options.mode)
        dyadics, runs = _run_rdnm(
            cleaned, decomp, h, g, bounds.qmax_exponent, options.jobs, options.keep_traces
        )
        status = "certified-eps" if options.mode == "certified" else "adaptive-heuristic"

    elif options.mode == "certified":
        u = max(bounds.qmax_exponent, 0)
        if u == 0:
            alpha = cmin * HALF * bounds.qmin_lower  # <= 1/2 by construction
            h = _params_q_le_1(n, d, f, alpha, norm_p_one(cleaned), epsilon)
            g = h - 1
            if h > options.max_h:
                raise ParamsInfeasible(
                    f"certified h = {h} exceeds the ceiling {options.max_h}"
                )
            params = DriverParams(alpha=alpha, h=h, g=g, u=0, mode="certified")
            dyadics, runs = _run_rdnm(
                cleaned, decomp, h, g, bounds.qmax_exponent, options.jobs, options.keep_traces
            )
        else:
            beta = cmin * min(ONE, HALF * bounds.qmin_lower)
            g = _params_general(n, d, f, u, beta, norm_p_one(cleaned), epsilon)
            h_run = g + 1  # grid used on the rescaled system
            h_report = g + 1 - u  # the equivalent grid on the original system
            if h_run > options.max_h:
                raise ParamsInfeasible(
                    f"certified h = {h_run} (u = {u}) exceeds the ceiling {options.max_h}"
                )
            alpha_prime = beta / (1 << (2 * u))
            params = DriverParams(alpha=alpha_prime, h=h_report, g=g, u=u, mode="certified")
            scaled = rescale(cleaned, u)
            dyadics, runs = _run_rdnm(
                scaled, decomp, h_run, g, 0, options.jobs, options.keep_traces
            )
            # Undo the rescaling exactly: m * 2**-h_run times 2**u is m on
            # the 2**-h_report grid, so only the scale tag changes.
            dyadics = [Dyadic(dy.mantissa, h_report) for dy in dyadics]
        status = "certified-eps"

    else:  # adaptive
        h = ceil_log2(ONE / epsilon) + 8
        tolerance = epsilon / 4
        previous = None
        dyadics = runs = None
        while True:
            if h > options.max_h:
                raise ParamsInfeasible(
                    f"adaptive refinement passed the ceiling {options.max_h} without settling"
                )
            dyadics, runs = _run_rdnm(
                cleaned, decomp, h, h - 1, bounds.qmax_exponent, options.jobs, options.keep_traces
            )
            current = [dy.value() for dy in dyadics]
            if previous is not None and all(
                abs(a - b) <= tolerance for a, b in zip(current, previous)
            ):
                break
            previous = current
            h *= 2
        params = DriverParams(alpha=alpha_info, h=h, g=h - 1, u=0, mode="adaptive")
        status = "adaptive-heuristic"

    # Reinsert cleaned zeros at their original positions, then project back
    # to the input variables (dropping any normal-form product variables).
    grid = params.h
    full: list = [Dyadic(0, grid)] * work.n
    for cleaned_index, work_index in enumerate(kept):
        full[work_index] = dyadics[cleaned_index]
    if snf is not None:
        approx = tuple(full[snf.projection[i]] for i in range(sys.n))
    else:
        approx = tuple(full)

    return SolveReport(
        approximation=approx,
        names=tuple(sys.names),
        params=params,
        bounds=bounds,
        scc_runs=runs,
        status=status,
        epsilon=epsilon,
        info=info,
    )
