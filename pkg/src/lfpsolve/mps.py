"""Monotone polynomial systems: representation, JSON wire format, evaluation,
Jacobians, simple normal form, zero-variable cleaning, and size measurement.

A system is ``x = P(x)`` with one equation per variable.  Every monomial
coefficient (including constant terms) is strictly positive; that is what
makes P a monotone operator on the non-negative orthant, and it is enforced
at construction time.  Systems are immutable after construction and all
operations here are pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DegreeTooHigh, NotMonotone, ParseError
from .ratmath import ONE, ZERO, den, num, rat, rat_str


@dataclass(frozen=True)
class Monomial:
    """One term coefficient * prod x_i**e_i.

    ``exponents`` is a tuple of (variable index, exponent) pairs with
    strictly increasing indices and exponents >= 1; the empty tuple is a
    constant term.
    """

    coeff: object
    exponents: tuple

    def __post_init__(self):
        if self.coeff <= 0:
            raise NotMonotone(f"coefficient {self.coeff} is not positive")
        last = -1
        for v, e in self.exponents:
            if v <= last:
                raise ValueError("exponent indices must be strictly increasing")
            if e < 1:
                raise ValueError("exponents must be >= 1")
            last = v

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.exponents)

    def evaluate(self, z: Sequence):
        value = self.coeff
        for v, e in self.exponents:
            zv = z[v]
            if zv == 0:
                return ZERO
            value = value * (zv if e == 1 else zv**e)
        return value


def make_monomial(coeff, powers: Mapping[int, int] | None = None) -> Monomial:
    return Monomial(rat(coeff), tuple(sorted((powers or {}).items())))


@dataclass(frozen=True)
class MonotoneSystem:
    """x = P(x) with named variables; equation i defines variable i."""

    names: tuple
    equations: tuple

    def __post_init__(self):
        if len(self.names) != len(self.equations):
            raise ValueError("need exactly one equation per variable")
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be unique")
        if any(not isinstance(n, str) or not n for n in self.names):
            raise ValueError("variable names must be non-empty strings")
        n = len(self.names)
        for terms in self.equations:
            for mono in terms:
                if mono.exponents and mono.exponents[-1][0] >= n:
                    raise ValueError("monomial references an unknown variable")

    @property
    def n(self) -> int:
        return len(self.names)

    def degree(self) -> int:
        return max(
            (mono.degree for terms in self.equations for mono in terms),
            default=0,
        )


def system_of(names: Sequence[str], *equations) -> MonotoneSystem:
    """Build a system from (coefficient, {variable name: exponent}) pairs.

    Convenience constructor for tests and demos; the wire format below is
    the interchange form.
    """
    names = tuple(names)
    index = {name: i for i, name in enumerate(names)}
    built = []
    for terms in equations:
        eq = []
        for coeff, powers in terms:
            eq.append(make_monomial(coeff, {index[v]: e for v, e in powers.items()}))
        built.append(tuple(eq))
    return MonotoneSystem(names, tuple(built))


# --- JSON wire format ---------------------------------------------------------
#
#   {"vars": [name, ...],
#    "eqs":  [[{"c": "p/q", "m": {name: exponent, ...}}, ...], ...]}
#
# An empty "m" object is a constant term.  Serialization emits each term's
# variables in lexicographic order and the terms of an equation in descending
# total degree (deterministic tie-breaks), so identical systems serialize to
# identical bytes.


def parse_mps(text: str) -> MonotoneSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return system_from_json(doc)


def system_from_json(doc) -> MonotoneSystem:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    extra = set(doc) - {"vars", "eqs"}
    if extra:
        raise ParseError(f"unknown keys: {sorted(extra)}")
    if "vars" not in doc or "eqs" not in doc:
        raise ParseError('both "vars" and "eqs" are required')
    names = doc["vars"]
    eqs = doc["eqs"]
    if not isinstance(names, list) or any(not isinstance(s, str) or not s for s in names):
        raise ParseError('"vars" must be a list of non-empty strings')
    if len(set(names)) != len(names):
        raise ParseError("variable names must be unique")
    if not isinstance(eqs, list) or len(eqs) != len(names):
        raise ParseError('"eqs" must list exactly one equation per variable')
    index = {name: i for i, name in enumerate(names)}
    equations = []
    for pos, eq in enumerate(eqs):
        if not isinstance(eq, list):
            raise ParseError(f"equation {pos} must be a list of terms")
        terms = []
        for term in eq:
            if not isinstance(term, dict) or set(term) != {"c", "m"}:
                raise ParseError(f'terms must be objects with exactly "c" and "m" (equation {pos})')
            if not isinstance(term["c"], str):
                raise ParseError(f'coefficient must be a "p/q" string (equation {pos})')
            try:
                coeff = rat(term["c"])
            except ValueError as exc:
                raise ParseError(str(exc)) from None
            if coeff <= 0:
                raise NotMonotone(f"coefficient {term['c']} in equation {pos} is not positive")
            powers_raw = term["m"]
            if not isinstance(powers_raw, dict):
                raise ParseError(f'"m" must be an object (equation {pos})')
            powers = {}
            for name, exp in powers_raw.items():
                if name not in index:
                    raise ParseError(f"unknown variable {name!r} in equation {pos}")
                if not isinstance(exp, int) or isinstance(exp, bool) or exp < 1:
                    raise ParseError(f"exponent of {name!r} in equation {pos} must be an integer >= 1")
                powers[index[name]] = exp
            terms.append(make_monomial(coeff, powers))
        equations.append(tuple(terms))
    return MonotoneSystem(tuple(names), tuple(equations))


def _term_key(sys: MonotoneSystem, mono: Monomial):
    named = tuple(sorted((sys.names[v], e) for v, e in mono.exponents))
    return (-mono.degree, named, rat_str(mono.coeff))


def system_to_json(sys: MonotoneSystem) -> dict:
    eqs = []
    for terms in sys.equations:
        entries = []
        for mono in sorted(terms, key=lambda m: _term_key(sys, m)):
            powers = {
                name: e
                for name, e in sorted((sys.names[v], e) for v, e in mono.exponents)
            }
            entries.append({"c": rat_str(mono.coeff), "m": powers})
        eqs.append(entries)
    return {"vars": list(sys.names), "eqs": eqs}


def serialize_mps(sys: MonotoneSystem) -> str:
    return json.dumps(system_to_json(sys), indent=2)


# --- measurement and evaluation -----------------------------------------------


def encoding_size(sys: MonotoneSystem) -> int:
    """Deterministic bit size |P| of the sparse representation.

    Per monomial: bit lengths of the coefficient's numerator and denominator,
    plus, for every listed exponent, the bit lengths of the 1-based variable
    index and of the exponent.  Every theorem-derived parameter in this
    package uses this measure; it is one admissible convention (the
    underlying results fix |P| only up to constant factors) and solver
    reports flag it as such.
    """
    total = 0
    for terms in sys.equations:
        for mono in terms:
            total += num(mono.coeff).bit_length() + den(mono.coeff).bit_length()
            for v, e in mono.exponents:
                total += (v + 1).bit_length() + e.bit_length()
    return max(total, sys.n, 1)


def evaluate(sys: MonotoneSystem, z: Sequence) -> list:
    """Exact P(z)."""
    if len(z) != sys.n:
        raise ValueError("point has wrong dimension")
    out = []
    for terms in sys.equations:
        acc = ZERO
        for mono in terms:
            value = mono.evaluate(z)
            if value != 0:
                acc = acc + value
        out.append(acc)
    return out


def eval_jacobian(sys: MonotoneSystem, z: Sequence) -> list:
    """Exact Jacobian B(z) for a quadratic system (degree <= 2)."""
    if len(z) != sys.n:
        raise ValueError("point has wrong dimension")
    n = sys.n
    b = [[ZERO] * n for _ in range(n)]
    for i, terms in enumerate(sys.equations):
        row = b[i]
        for mono in terms:
            d = mono.degree
            if d > 2:
                raise DegreeTooHigh(
                    f"equation {sys.names[i]} has a degree-{d} monomial; "
                    "convert to simple normal form first"
                )
            if d == 0:
                continue
            if d == 1:
                ((v, _),) = mono.exponents
                row[v] = row[v] + mono.coeff
            elif len(mono.exponents) == 1:  # c * x_v^2
                ((v, _),) = mono.exponents
                row[v] = row[v] + 2 * mono.coeff * z[v]
            else:  # c * x_a * x_b with a < b
                (a, _), (bb, _) = mono.exponents
                row[a] = row[a] + mono.coeff * z[bb]
                row[bb] = row[bb] + mono.coeff * z[a]
    return b


def c_min(sys: MonotoneSystem):
    """Smallest coefficient or constant appearing in the system."""
    smallest = None
    for terms in sys.equations:
        for mono in terms:
            if smallest is None or mono.coeff < smallest:
                smallest = mono.coeff
    return smallest if smallest is not None else ONE


def norm_p_one(sys: MonotoneSystem):
    """||P(1)||_inf, i.e. the largest per-equation coefficient sum."""
    worst = ZERO
    for terms in sys.equations:
        acc = ZERO
        for mono in terms:
            acc = acc + mono.coeff
        if acc > worst:
            worst = acc
    return worst


# --- simple normal form ---------------------------------------------------------


@dataclass(frozen=True)
class SnfSystem:
    """A quadratic system in simple normal form.

    Every equation is either a single unit-coefficient product of two
    variables ("star") or linear ("plus").  Original variables keep their
    indices; ``projection[i]`` maps original variable i into the SNF system.
    """

    system: MonotoneSystem
    forms: tuple
    projection: tuple

    def __post_init__(self):
        for terms, form in zip(self.system.equations, self.forms):
            if form == "star":
                if len(terms) != 1 or terms[0].coeff != ONE or terms[0].degree != 2:
                    raise ValueError("star equations must be one unit-coefficient degree-2 product")
            elif form == "plus":
                if any(mono.degree > 1 for mono in terms):
                    raise ValueError("plus equations must be linear")
            else:
                raise ValueError(f"unknown form tag {form!r}")


def to_snf(sys: MonotoneSystem) -> SnfSystem:
    """Rewrite to simple normal form with fresh product variables.

    Each monomial of degree >= 2 is split left-associated over its variable
    list (in index order, repeated per exponent), introducing one fresh
    "star" equation per product; the coefficient stays on the host equation,
    which becomes linear.  The least fixed point projected to the original
    variables is unchanged.  Linear input passes through untouched.
    """
    used = set(sys.names)
    aux_names: list[str] = []
    aux_eqs: list[tuple] = []
    n0 = sys.n

    def fresh_name() -> str:
        name = f"w{len(aux_names) + 1}"
        while name in used:
            name = "_" + name
        used.add(name)
        return name

    rewritten = []
    for terms in sys.equations:
        new_terms = []
        for mono in terms:
            if mono.degree <= 1:
                new_terms.append(mono)
                continue
            flat = [v for v, e in mono.exponents for _ in range(e)]
            current = flat[0]
            for nxt in flat[1:]:
                if current == nxt:
                    exps = ((current, 2),)
                else:
                    exps = tuple(sorted(((current, 1), (nxt, 1))))
                index = n0 + len(aux_eqs)
                aux_eqs.append((Monomial(ONE, exps),))
                aux_names.append(fresh_name())
                current = index
            new_terms.append(Monomial(mono.coeff, ((current, 1),)))
        rewritten.append(tuple(new_terms))

    snf = MonotoneSystem(
        tuple(sys.names) + tuple(aux_names),
        tuple(rewritten) + tuple(aux_eqs),
    )
    forms = ("plus",) * n0 + ("star",) * len(aux_eqs)
    return SnfSystem(snf, forms, tuple(range(n0)))


# --- zero variables and cleaning -------------------------------------------------


def detect_zero_variables(sys: MonotoneSystem) -> frozenset:
    """Indices i with least-fixed-point coordinate exactly 0.

    Marks a variable "positive" once some monomial of its equation has all
    of its variables already marked (constants are vacuously so), iterating
    to a fixpoint; the unmarked variables are exactly the zero set of the
    n-fold value iterate from 0.
    """
    positive: set[int] = set()
    changed = True
    while changed:
        changed = False
        for i, terms in enumerate(sys.equations):
            if i in positive:
                continue
            for mono in terms:
                if all(v in positive for v, _ in mono.exponents):
                    positive.add(i)
                    changed = True
                    break
    return frozenset(range(sys.n)) - positive


def clean(sys: MonotoneSystem):
    """Remove zero variables; returns (cleaned system, kept original indices).

    Equations of zero variables are dropped and every monomial mentioning a
    zero variable is deleted from the remaining right-hand sides (its value
    is identically 0; constants are never dropped).  The result has a
    strictly positive least fixed point in every coordinate; it may be the
    empty system.
    """
    zeros = detect_zero_variables(sys)
    kept = [i for i in range(sys.n) if i not in zeros]
    remap = {old: new for new, old in enumerate(kept)}
    equations = []
    for i in kept:
        terms = []
        for mono in sys.equations[i]:
            if any(v in zeros for v, _ in mono.exponents):
                continue
            terms.append(
                Monomial(mono.coeff, tuple((remap[v], e) for v, e in mono.exponents))
            )
        equations.append(tuple(terms))
    cleaned = MonotoneSystem(tuple(sys.names[i] for i in kept), tuple(equations))
    return cleaned, tuple(kept)
