"""Cooper-style quantifier elimination over the integers."""

from __future__ import annotations

import math
from typing import Dict, List, Tuple

from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Div,
    Eq,
    Exists,
    Forall,
    Formula,
    Le,
    Not,
    Or,
    Term,
    conj,
    disj,
    div,
    eq,
    is_quantifier_free,
    le,
    neg,
    nnf,
    substitute,
)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _key(term: Term) -> Tuple[Tuple[Tuple[str, int], ...], int]:
    """Canonical linear part (first coefficient positive) and its sign."""
    if term.coeffs[0][1] > 0:
        return term.coeffs, 1
    return tuple((v, -c) for v, c in term.coeffs), -1


def tighten(items: List[Formula]) -> Formula:
    """Merge bound atoms sharing a linear part inside a conjunction."""
    bounds: Dict[tuple, List] = {}
    others: List[Formula] = []
    for a in items:
        if isinstance(a, (Le, Eq)):
            lin, sgn = _key(a.term)
            lo_hi = bounds.setdefault(lin, [None, None])
            c = a.term.const
            # sgn * L + c <= 0 (or = 0), L the canonical linear form
            if isinstance(a, Eq):
                val = -c
                lo_hi[0] = val if lo_hi[0] is None else max(lo_hi[0], val)
                lo_hi[1] = val if lo_hi[1] is None else min(lo_hi[1], val)
            elif sgn > 0:
                lo_hi[1] = -c if lo_hi[1] is None else min(lo_hi[1], -c)
            else:
                lo_hi[0] = c if lo_hi[0] is None else max(lo_hi[0], c)
        else:
            others.append(a)
    out: List[Formula] = []
    for lin, (lo, hi) in bounds.items():
        lt = Term(lin)
        if lo is not None and hi is not None:
            if lo > hi:
                return FALSE
            if lo == hi:
                out.append(eq(lt - lo))
                continue
        if lo is not None:
            out.append(le(lo - lt))
        if hi is not None:
            out.append(le(lt - hi))
    return conj(*out, *others)


def simplify(f: Formula) -> Formula:
    if isinstance(f, And):
        parts = [simplify(a) for a in f.args]
        g = conj(*parts)
        if isinstance(g, And):
            return tighten(list(g.args))
        return g
    if isinstance(f, Or):
        return disj(*(simplify(a) for a in f.args))
    return f


def _rescale(a: Atom, x: str, lcm: int) -> Formula:
    c = a.term.coeff(x)
    if not c:
        return a
    k = lcm // abs(c)
    rest = a.term.without(x) * k
    sign = 1 if c > 0 else -1
    if isinstance(a, Div):
        t = rest + Term.var(x, sign)
        if sign < 0:
            t = -t
        return Div(a.modulus * k, Term(t.coeffs, t.const % (a.modulus * k)))
    t = rest + Term.var(x, sign)
    return Le(t) if isinstance(a, Le) else Eq(t)


def _map_atoms(f: Formula, fn) -> Formula:
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, And):
        return conj(*(_map_atoms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_map_atoms(a, fn) for a in f.args))
    return f


def _collect(f: Formula, x: str, out: List[Atom]) -> None:
    if isinstance(f, Atom):
        if f.term.coeff(x):
            out.append(f)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            _collect(a, x, out)


def _infinity(f: Formula, x: str, side: int) -> Formula:
    """Substitute x -> side * infinity into bound atoms (coefficient of x is +-1)."""

    def fn(a: Atom) -> Formula:
        c = a.term.coeff(x)
        if not c or isinstance(a, Div):
            return a
        if isinstance(a, Eq):
            return FALSE
        # c*x + s <= 0 holds at -inf iff c > 0
        return TRUE if c * side < 0 else FALSE

    return _map_atoms(f, fn)


def cooper(x: str, phi: Formula) -> Formula:
    """Eliminate ``exists x`` from a quantifier-free NNF formula."""
    found: List[Atom] = []
    _collect(phi, x, found)
    if not found:
        return phi
    L = 1
    for a in found:
        L = _lcm(L, abs(a.term.coeff(x)))
    phi = _map_atoms(phi, lambda a: _rescale(a, x, L))
    if L > 1:
        phi = conj(phi, Div(L, Term.var(x)))
    found = []
    _collect(phi, x, found)
    D = 1
    lower: List[Term] = []
    upper: List[Term] = []
    for a in found:
        c = a.term.coeff(x)
        rest = a.term.without(x)
        if isinstance(a, Div):
            D = _lcm(D, a.modulus)
        elif isinstance(a, Le):
            if c > 0:  # x <= -rest
                upper.append(-rest + 1)
            else:  # x >= rest
                lower.append(rest - 1)
        else:
            val = -rest if c > 0 else rest
            lower.append(val - 1)
            upper.append(val + 1)
    lower = list(dict.fromkeys(lower))
    upper = list(dict.fromkeys(upper))
    if len(lower) <= len(upper):
        side, points, step = -1, lower, 1
    else:
        side, points, step = 1, upper, -1
    out = []
    inf = _infinity(phi, x, side)
    if inf != FALSE:
        for j in range(1, D + 1):
            out.append(substitute(inf, x, Term.constant(step * j)))
    for b in points:
        for j in range(1, D + 1):
            out.append(substitute(phi, x, b + step * j))
    return simplify(disj(*out))


def _eq_substitute(x: str, e: Atom, rest: Formula) -> Formula:
    """exists x (c*x + t = 0 and rest)  ==  c | t and rest[|c| x := -sign(c) t]."""
    c = e.term.coeff(x)
    t = e.term.without(x)
    ac = abs(c)
    value = -t if c > 0 else t  # value of |c| * x

    def fn(a: Atom) -> Formula:
        k = a.term.coeff(x)
        if not k:
            return a
        scaled = a.term.without(x) * ac + value * k
        if isinstance(a, Le):
            return le(scaled)
        if isinstance(a, Eq):
            return eq(scaled)
        return div(a.modulus * ac, scaled)

    return conj(div(ac, t), _map_atoms(rest, fn))


ENUMERATE_LIMIT = 64


def _constant_range(x: str, conjuncts: List[Formula]):
    """[lo, hi] implied by the conjuncts over x alone, None when a side is open."""
    lo = hi = None
    for a in conjuncts:
        if not isinstance(a, (Le, Eq)) or len(a.term.coeffs) != 1 or a.term.coeffs[0][0] != x:
            continue
        c, k = a.term.coeffs[0][1], a.term.const
        if isinstance(a, Eq):
            if k % abs(c):
                return 1, 0
            v = -k // c
            lo_v, hi_v = v, v
        elif c > 0:  # x <= floor(-k / c)
            lo_v, hi_v = None, (-k) // c
        else:  # x >= ceil(k / |c|)
            lo_v, hi_v = -((-k) // -c), None
        if lo_v is not None:
            lo = lo_v if lo is None else max(lo, lo_v)
        if hi_v is not None:
            hi = hi_v if hi is None else min(hi, hi_v)
    if lo is None or hi is None:
        return None
    return lo, hi


def eliminate_exists(x: str, phi: Formula) -> Formula:
    """Quantifier-free equivalent of ``exists x. phi`` for QF ``phi``."""
    phi = nnf(phi)
    if x not in phi.free_vars():
        return phi
    if isinstance(phi, Or):
        return disj(*(eliminate_exists(x, a) for a in phi.args))
    if isinstance(phi, And):
        with_x = [a for a in phi.args if x in a.free_vars()]
        without = [a for a in phi.args if x not in a.free_vars()]
        eqs = [a for a in with_x if isinstance(a, Eq)]
        if eqs:
            e = min(eqs, key=lambda a: abs(a.term.coeff(x)))
            others = conj(*(a for a in with_x if a is not e))
            return simplify(conj(_eq_substitute(x, e, others), *without))
        rng = _constant_range(x, with_x)
        if rng is not None and rng[1] - rng[0] < ENUMERATE_LIMIT:
            body = conj(*with_x)
            cases = (simplify(substitute(body, x, Term.constant(v))) for v in range(rng[0], rng[1] + 1))
            return simplify(conj(disj(*cases), *without))
        ors = [a for a in with_x if isinstance(a, Or)]
        if len(ors) == 1 and len(with_x) > 1:
            # exists distributes over the disjuncts; each branch then sees plain bounds
            pick = ors[0]
            rest = [a for a in with_x if a is not pick]
            return simplify(conj(disj(*(eliminate_exists(x, conj(d, *rest)) for d in pick.args)), *without))
        body = conj(*with_x)
        if isinstance(body, Or):
            return simplify(conj(eliminate_exists(x, body), *without))
        return simplify(conj(cooper(x, body), *without))
    if isinstance(phi, Eq):
        return div(abs(phi.term.coeff(x)), phi.term.without(x))
    return cooper(x, phi)


def eliminate_quantifiers(f: Formula) -> Formula:
    """Logically equivalent quantifier-free formula over the same free variables."""
    if isinstance(f, (Const, Atom)):
        return f
    if isinstance(f, Not):
        return nnf(neg(eliminate_quantifiers(f.arg)))
    if isinstance(f, And):
        return simplify(conj(*(eliminate_quantifiers(a) for a in f.args)))
    if isinstance(f, Or):
        return disj(*(eliminate_quantifiers(a) for a in f.args))
    if not is_quantifier_free(f.body):
        # a constant box around x: instantiate before the inner eliminations see x
        probe = nnf(f.body if isinstance(f, Exists) else Not(f.body))
        rng = _constant_range(f.var, list(probe.args) if isinstance(probe, And) else [probe])
        if rng is not None and rng[1] - rng[0] < ENUMERATE_LIMIT:
            cases = [eliminate_quantifiers(substitute(f.body, f.var, Term.constant(v))) for v in range(rng[0], rng[1] + 1)]
            return simplify(disj(*cases)) if isinstance(f, Exists) else simplify(conj(*cases))
    body = eliminate_quantifiers(f.body)
    if isinstance(f, Exists):
        return eliminate_exists(f.var, body)
    if isinstance(f, Forall):
        return nnf(neg(eliminate_exists(f.var, neg(body))))
    raise TypeError(f)
