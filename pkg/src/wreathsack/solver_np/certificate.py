"""NP certificates: cycle-compressed Cayley representations, their verifier and a bounded search."""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..expr import ExponentExpression, Valuation, is_solution
from ..periodic import PeriodicProduct, PeriodicWord, membership
from ..presburger import FALSE, TRUE, conj, eq, formula_to_semilinear, Term
from ..wreath import WreathProduct
from .automata import build_block_nfa, pad
from .cayley import (
    CellExpr,
    Factor,
    Marked,
    cayley_representation,
    expression_factors,
    one,
    parse_cell,
    split_variables,
)
from .compression import CompressedMatcher, CycleCompression

log = logging.getLogger("wreathsack.np")

MAX_VARIABLE_CELLS = 1 << 16
RECHECK_LIMIT = 100000


class MalformedCertificate(ValueError):
    """The certificate does not parse or has the wrong shape (as opposed to being rejected)."""


@dataclass
class Certificate:
    factors: List[CycleCompression]
    x1_exponents: Dict[str, int] = field(default_factory=dict)

    @property
    def length(self) -> int:
        return len(self.factors[0]) if self.factors else 0

    def to_dict(self, group: WreathProduct) -> dict:
        G = group.base
        return {
            "factors": [
                {"cycles": [{"beta": [c.text(G) for c in b], "len": str(n)} for b, n in cc.factors]}
                for cc in self.factors
            ],
            "x1_exponents": {k: str(v) for k, v in self.x1_exponents.items()},
        }

    def to_json(self, group: WreathProduct) -> str:
        return json.dumps(self.to_dict(group), indent=1)

    @classmethod
    def from_dict(cls, data, group: WreathProduct) -> "Certificate":
        G = group.base
        try:
            factors = []
            for f in data["factors"]:
                cycles = []
                for c in f["cycles"]:
                    n = int(str(c["len"]), 10)
                    beta = tuple(parse_cell(str(t), G) for t in c["beta"])
                    cycles.append((beta, n))
                factors.append(CycleCompression(tuple(cycles)))
            x1 = {str(k): int(str(v), 10) for k, v in dict(data.get("x1_exponents", {})).items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise MalformedCertificate(f"malformed certificate: {exc}") from exc
        if any(v < 0 for v in x1.values()):
            raise MalformedCertificate("exponents are natural numbers")
        return cls(factors, x1)

    @classmethod
    def from_json(cls, text: str, group: WreathProduct) -> "Certificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedCertificate(f"not JSON: {exc}") from exc
        return cls.from_dict(data, group)


@dataclass
class Verdict:
    accepted: bool
    reason: str = ""
    valuation: Optional[Valuation] = None

    def __bool__(self) -> bool:
        return self.accepted


# -- building ------------------------------------------------------------------


def factor_representation(factor: Factor, n: Optional[int], group: WreathProduct) -> Tuple[CycleCompression, int, int]:
    """Compressed Cayley representation of one factor, as read by its block automaton.

    Returns (word, first position, shift).  For a shifting power with n copies
    the middle of the word repeats with period |d| and is stored as one cycle.
    """
    G = group.base
    g = group.evaluate_word(list(factor.word))
    a, b = group.support_interval(g)
    d = g.shift
    f = dict(g.support)
    ident = G.identity()
    if factor.var is None or d == 0:
        cells = []
        for c in range(a, b + 1):
            v = f.get(c, ident)
            e = CellExpr.power(v, factor.var, G) if factor.var is not None else CellExpr.constant(v)
            cells.append(Marked(e, top=c == 0, bottom=c == d))
        return CycleCompression.of_word(cells), a, d
    if n == 0:
        return CycleCompression.of_word([one(G, True, True)]), 0, 0
    lo, hi = a + min(0, (n - 1) * d), b + max(0, (n - 1) * d)
    step = abs(d)

    def cell(p: int) -> Marked:
        acc = ident
        for c in range(a, b + 1):
            if (p - c) % step == 0 and 0 <= (p - c) // d < n and c in f:
                acc = G.add(acc, f[c])
        return Marked(CellExpr.constant(acc), top=p == 0, bottom=p == n * d)

    if d > 0:
        mid_lo, mid_hi = b - d + 1, a + n * d - 1
    else:
        mid_lo, mid_hi = b + n * d + 1, a - d - 1
    if mid_hi - mid_lo + 1 <= 2 * step:
        return CycleCompression.of_word([cell(p) for p in range(lo, hi + 1)]), lo, n * d
    left = [cell(p) for p in range(lo, mid_lo)]
    period = [cell(p) for p in range(mid_lo, mid_lo + step)]
    right = [cell(p) for p in range(mid_hi + 1, hi + 1)]
    parts = []
    if left:
        parts.append((tuple(left), len(left)))
    parts.append((tuple(period), mid_hi - mid_lo + 1))
    if right:
        parts.append((tuple(right), len(right)))
    return CycleCompression(tuple(parts)), lo, n * d


def certificate_from_solution(e: ExponentExpression, nu: Mapping[str, int], group: WreathProduct) -> Certificate:
    """Certificate describing the run of every factor automaton on the solution nu."""
    if not is_solution(e, nu, group):
        raise ValueError("valuation is not a solution")
    G = group.base
    _, x1 = split_variables(e, group)
    placed = []
    cursor = 0
    for fac in expression_factors(e):
        n = nu[fac.var] if fac.var is not None else None
        cc, first, shift = factor_representation(fac, n, group)
        placed.append((cc, cursor + first))
        cursor += shift
    lo = min(s for _, s in placed)
    hi = max(s + len(cc) - 1 for cc, s in placed)
    pad_cell = one(G)
    out = []
    for cc, s in placed:
        parts = []
        if s > lo:
            parts.append(((pad_cell,), s - lo))
        parts += list(cc.factors)
        right = hi - (s + len(cc) - 1)
        if right:
            parts.append(((pad_cell,), right))
        out.append(CycleCompression(tuple(parts)))
    return Certificate(out, {v: int(nu[v]) for v in x1})


# -- verification --------------------------------------------------------------


class _Verifier:
    def __init__(self, e: ExponentExpression, group: WreathProduct):
        self.e = e
        self.group = group
        self.G = group.base
        self.factors = expression_factors(e)
        self.x0, self.x1 = split_variables(e, group)
        self.shifts = [group.evaluate_word(list(f.word)).shift for f in self.factors]
        self._matchers: Optional[List[CompressedMatcher]] = None

    @property
    def matchers(self) -> List[CompressedMatcher]:
        if self._matchers is None:
            self._matchers = [CompressedMatcher(pad(build_block_nfa(f.word, f.var, self.group), self.G)) for f in self.factors]
        return self._matchers

    def verify(self, cert: Certificate) -> Verdict:
        G = self.G
        if len(cert.factors) != len(self.factors):
            raise MalformedCertificate(f"expected {len(self.factors)} factors, got {len(cert.factors)}")
        unknown = set(cert.x1_exponents) - set(self.x1)
        if unknown or set(self.x1) - set(cert.x1_exponents):
            raise MalformedCertificate(f"x1_exponents must name exactly {sorted(self.x1)}")
        lengths = {len(cc) for cc in cert.factors}
        if len(lengths) != 1:
            return Verdict(False, "factor words differ in length")
        for i, (m, cc) in enumerate(zip(self.matchers, cert.factors)):
            if not m.member(cc):
                return Verdict(False, f"factor {i + 1} is not accepted by its automaton")
        marks = []
        for cc in cert.factors:
            tops = cc.positions_of(lambda c: c.top, cap=2)
            bots = cc.positions_of(lambda c: c.bottom, cap=2)
            if len(tops) != 1 or len(bots) != 1:
                return Verdict(False, "a factor word needs exactly one top and one bottom mark")
            marks.append((tops[0], bots[0]))
        for (t1, b1), (t2, b2) in zip(marks, marks[1:]):
            if b1 != t2:
                return Verdict(False, "markers are not consistent")
        if marks[0][0] != marks[-1][1]:
            return Verdict(False, "the cursor does not return to the origin")
        nu: Dict[str, int] = {}
        for fac, d, (t, b) in zip(self.factors, self.shifts, marks):
            if fac.var is None or d == 0:
                continue
            if (b - t) % d or (b - t) // d != cert.x1_exponents[fac.var]:
                return Verdict(False, f"exponent of {fac.var} does not match the representation")
            nu[fac.var] = (b - t) // d
        # columns carrying variables go to the exponent equation side
        var_pos = set()
        try:
            for cc in cert.factors:
                var_pos.update(cc.positions_of(lambda c: bool(c.expr.coeffs), cap=MAX_VARIABLE_CELLS))
        except ValueError:
            return Verdict(False, "too many variable cells")
        system = []
        for p in sorted(var_pos):
            acc = CellExpr.constant(G.identity())
            for cc in cert.factors:
                acc = acc.add(cc.letter_at(p).expr, G)
            acc = acc.substitute(nu, G)
            system.append(acc.constraints(G))
        x0 = [v for v in self.x0 if v not in nu]
        sol = formula_to_semilinear(conj(*system), x0) if system else None
        if sol is not None and sol.is_empty():
            return Verdict(False, "the exponent equations have no solution")
        if sol is not None:
            nu.update(zip(x0, sol.sample_point()))
        for v in self.e.variables:
            nu.setdefault(v, 0)
        # what is left is a product of periodic sequences per aligned segment
        rest = [cc.remove_positions(var_pos) for cc in cert.factors]
        cuts = set()
        for cc in rest:
            cuts.update(cc.boundaries())
        rest = [cc.aligned(cuts) for cc in rest]
        for segs in zip(*(cc.factors for cc in rest)):
            n = segs[0][1]
            words = [PeriodicWord(tuple(c.expr.const for c in b)) for b, _ in segs]
            if not membership(PeriodicProduct(G, words), n):
                return Verdict(False, "a periodic segment does not vanish")
        if max(nu.values(), default=0) <= RECHECK_LIMIT and not is_solution(self.e, nu, self.group):
            raise AssertionError(f"accepted certificate yields a non-solution {nu}")
        return Verdict(True, "accepted", nu)


def verify_certificate(e: ExponentExpression, cert: Certificate, group: WreathProduct) -> Verdict:
    """Accept iff the certificate encodes a solution; MalformedCertificate on shape errors."""
    return _Verifier(e, group).verify(cert)


# -- search ----------------------------------------------------------------------


@dataclass
class SearchResult:
    status: str  # "sat", "unsat" or "unknown"
    valuation: Optional[Valuation] = None
    certificate: Optional[Certificate] = None
    tried: int = 0


def _shift_candidates(e: ExponentExpression, group: WreathProduct, x1: Sequence[str]):
    """X1 exponent vectors with total shift zero, by increasing sum; None if provably none."""
    shift = Term()
    for f in expression_factors(e):
        d = group.evaluate_word(list(f.word)).shift
        shift = shift + (Term.var(f.var, d) if f.var in x1 else Term.constant(d if f.var is None else 0))
    if not x1:
        return [{}] if shift.const == 0 else None
    T = formula_to_semilinear(eq(shift), list(x1))
    if T.is_empty():
        return None
    if all(not c.periods for c in T.components):
        return sorted((dict(zip(x1, c.base)) for c in T.components), key=lambda v: sum(v.values()))

    def gen():
        # b + sum lam_j p_j over all components, by increasing sum of the lambdas
        seen = set()
        for total in itertools.count():
            for c in T.components:
                for lams in _compositions(total, len(c.periods)) if c.periods else ([()] if total == 0 else []):
                    v = tuple(b + sum(l * p[i] for l, p in zip(lams, c.periods)) for i, b in enumerate(c.base))
                    if v not in seen:
                        seen.add(v)
                        yield dict(zip(x1, v))

    return gen()


def _compositions(total: int, k: int):
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def search_solve(e: ExponentExpression, group: WreathProduct, budget: int = 1000) -> SearchResult:
    """Try X1 exponent vectors up to the budget; each one leaves a rigid expression to decide exactly."""
    G = group.base
    x0, x1 = split_variables(e, group)
    cands = _shift_candidates(e, group, x1)
    if cands is None:
        return SearchResult("unsat")
    finite = isinstance(cands, list)
    tried = 0
    for part in cands:
        if tried >= budget:
            return SearchResult("unknown", tried=tried)
        tried += 1
        r = cayley_representation(e, group, part)
        system = [c.expr.constraints(G) for c in r.cells if c.expr.coeffs or not G.is_identity(c.expr.const)]
        f = conj(*system)
        if f == FALSE:
            continue
        nu = dict(part)
        if f != TRUE:
            sol = formula_to_semilinear(f, x0)
            if sol.is_empty():
                continue
            nu.update(zip(x0, sol.sample_point()))
        for v in e.variables:
            nu.setdefault(v, 0)
        if not is_solution(e, nu, group):
            raise AssertionError(f"search produced a non-solution {nu}")
        cert = certificate_from_solution(e, nu, group)
        return SearchResult("sat", nu, cert, tried)
    return SearchResult("unsat" if finite else "unknown", tried=tried)
