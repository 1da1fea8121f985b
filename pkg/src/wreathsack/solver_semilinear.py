"""Complete solver for exponent equations over G wr Z, G abelian.

The value of E = v0 u1^x1 v1 ... uk^xk vk at a cursor position h is the sum
of the lamp contributions of every address landing on h.  Addresses of a
power with nonzero shift sweep an arithmetic progression whose length is the
exponent; the others sit at a position that only depends on the shifting
exponents.  Grouping addresses by the position they share gives clusters; E
evaluates to 1 iff the shift sums to zero and every cluster cancels.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .abelian import AbelianElement
from .expr import ExponentExpression, Valuation
from .presburger import (
    FALSE,
    TRUE,
    Formula,
    SemilinearSet,
    Term,
    conj,
    div,
    eq,
    formula_to_semilinear,
    le,
    neg,
    nnf,
    nonneg,
)
from .presburger.formula import Const, evaluate as eval_formula
from .presburger.qe import eliminate_exists, simplify
from .presburger.semilinear import LinearSet, conjunction_to_semilinear, direct_sum, dnf, permute, restrict
from .wreath import WreathProduct

log = logging.getLogger("wreathsack.solver")

H = "@h"


class SolverLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class Segment:
    """A constant word (var is None) or a power u^x, with its value in G wr Z."""

    index: int
    var: Optional[str]
    value: object  # WreathElement
    offset: Term  # cursor position where the segment starts, linear in shifting exponents

    @property
    def sigma(self) -> int:
        return self.value.shift

    @property
    def kind(self) -> str:
        if self.var is None:
            return "const"
        return "M" if self.sigma else "S"


@dataclass(frozen=True)
class Address:
    segment: int
    position: int
    kind: str
    var: Optional[str]
    sigma: int
    tau: AbelianElement

    def __repr__(self) -> str:
        return f"({self.segment},{self.position})"


def _segments(e: ExponentExpression, group: WreathProduct) -> List[Segment]:
    segs: List[Segment] = []
    offset = Term()

    def add(var, word):
        nonlocal offset
        g = group.evaluate_word(word)
        if var is None and not g.support and not g.shift:
            return
        segs.append(Segment(len(segs), var, g, offset))
        offset = offset + (Term.var(var, g.shift) if var is not None and g.shift else Term.constant(g.shift if var is None else 0))

    add(None, e.prefix)
    for b in e.blocks:
        add(b.var, b.base)
        add(None, b.suffix)
    return segs


def compute_addresses(e: ExponentExpression, group: WreathProduct) -> List[Address]:
    """Addresses in the global order: segment by segment, then by position."""
    out = []
    for s in _segments(e, group):
        pts = list(s.value.support)
        pts.sort(key=lambda pv: pv[0], reverse=s.kind == "M" and s.sigma > 0)
        for h, v in pts:
            out.append(Address(s.index, h, s.kind, s.var, s.sigma, v))
    return out


class Analysis:
    """Everything the solver derives from one expression."""

    def __init__(self, e: ExponentExpression, group: WreathProduct, subset_sum: bool = False):
        self.expression = e
        self.group = group
        self.G = group.base
        self.subset_sum = subset_sum
        self.segments = _segments(e, group)
        self.addresses = compute_addresses(e, group)
        self.variables = e.variables
        seg_vars = [(s.var, s.kind) for s in self.segments if s.var is not None]
        self.M = list(dict.fromkeys(v for v, k in seg_vars if k == "M"))
        self.S = list(dict.fromkeys(v for v, k in seg_vars if k == "S" and v not in self.M))
        # variables whose every block has trivial value constrain nothing
        self.free = [v for v in self.variables if v not in self.M and v not in self.S]
        self.overlap = bool({v for v, k in seg_vars if k == "S"} & set(self.M))
        self._offsets = {s.index: s.offset for s in self.segments}
        self._cluster_cache: Dict[FrozenSet[int], Formula] = {}

    # -- formulas

    def bounds(self, names: Iterable[str]) -> Formula:
        names = list(names)
        parts = [nonneg(*names)]
        if self.subset_sum:
            parts += [le(Term.var(v) - 1) for v in names]
        return conj(*parts)

    def sigma_condition(self) -> Formula:
        total = Term()
        for s in self.segments:
            if s.var is None:
                total = total + s.sigma
            elif s.sigma:
                total = total + Term.var(s.var, s.sigma)
        return eq(total)

    def sigma_expression(self, a: Address, y: str = "@y") -> Term:
        base = self._offsets[a.segment] + a.position
        if a.kind == "M":
            return base + Term.var(y, a.sigma)
        return base

    def covers(self, a: Address, h: Term) -> Formula:
        """Some copy of address a lands on h."""
        d = h - self._offsets[a.segment] - a.position
        if a.kind != "M":
            return eq(d)
        span = Term.var(a.var, a.sigma) - a.sigma  # sigma * (x - 1)
        if a.sigma > 0:
            return conj(div(a.sigma, d), le(-d), le(d - span))
        return conj(div(-a.sigma, d), le(d), le(span - d))

    def cluster_formula(self, C: Iterable[int]) -> Formula:
        """Quantifier-free formula over M saying the addresses C form exactly one cluster."""
        C = frozenset(C)
        if not C:
            raise ValueError("clusters are nonempty")
        if C in self._cluster_cache:
            return self._cluster_cache[C]
        A = self.addresses
        # distinguished address: a non-sweeping one pins h without a quantifier
        a = min(C, key=lambda i: (A[i].kind == "M", i))
        pos = self.sigma_expression(A[a], "@y")
        rest = [self.covers(A[b], pos) for b in C if b != a]
        rest += [neg(self.covers(A[b], pos)) for b in range(len(A)) if b not in C]
        body = nnf(conj(*rest))
        if A[a].kind == "M":
            y = Term.var("@y")
            body = conj(body, le(-y), le(y - Term.var(A[a].var) + 1))
            f = simplify(eliminate_exists("@y", body))
        else:
            f = simplify(body)
        self._cluster_cache[C] = f
        return f

    def cancelling_terms(self, C: Iterable[int]) -> Tuple[List[Term], List[Tuple[int, Term]]]:
        free = [Term() for _ in range(self.G.rank)]
        tors = [Term() for _ in self.G.torsion_orders]
        for i in C:
            a = self.addresses[i]
            for j, c in enumerate(a.tau.free):
                if c:
                    free[j] = free[j] + (Term.var(a.var, c) if a.kind == "S" else Term.constant(c))
            for j, c in enumerate(a.tau.torsion):
                if c:
                    tors[j] = tors[j] + (Term.var(a.var, c) if a.kind == "S" else Term.constant(c))
        return free, list(zip(self.G.torsion_orders, tors))

    def cancelling_formula(self, C: Iterable[int]) -> Formula:
        free, tors = self.cancelling_terms(C)
        return conj(*(eq(t) for t in free), *(div(d, t) for d, t in tors))

    # -- concrete side, for witnesses and oracles

    def positions(self, a: Address, mu: Mapping[str, int]) -> List[int]:
        base = (self._offsets[a.segment] + a.position).evaluate(mu)
        if a.kind != "M":
            return [base]
        return [base + a.sigma * y for y in range(mu[a.var])]

    def cluster_map(self, mu: Mapping[str, int]) -> Dict[int, FrozenSet[int]]:
        """Position -> set of addresses landing there, for a valuation of the shifting variables."""
        env = {v: mu.get(v, 0) for v in self.M}
        where: Dict[int, Set[int]] = {}
        for i, a in enumerate(self.addresses):
            for p in self.positions(a, env):
                where.setdefault(p, set()).add(i)
        return {p: frozenset(s) for p, s in where.items()}

    def sigma_ok(self, mu: Mapping[str, int]) -> bool:
        return eval_formula(self.sigma_condition(), {v: mu.get(v, 0) for v in self.M})

    def sample_shifts(self, limit: int = 400) -> List[Dict[str, int]]:
        """Valuations of M inside the sigma condition, drawn from its semilinear description."""
        if not self.M:
            return [{}] if self.sigma_condition() == TRUE else []
        T = formula_to_semilinear(conj(self.sigma_condition(), self.bounds(self.M)), self.M)
        out: List[Dict[str, int]] = []
        seen = set()
        for reach in (1, 2, 3):
            for comp in T.components:
                n = len(comp.periods)
                for lams in itertools.product(range(reach + 1), repeat=n):
                    if max(lams, default=0) < reach - 1 and reach > 1:
                        continue
                    v = tuple(b + sum(l * p[i] for l, p in zip(lams, comp.periods)) for i, b in enumerate(comp.base))
                    if v not in seen:
                        seen.add(v)
                        out.append(dict(zip(self.M, v)))
                    if len(out) >= limit:
                        return out
        return out


# -- satisfiability ------------------------------------------------------------


def exact_sat(f: Formula, order: Sequence[str] = ()) -> bool:
    """Decide the existential closure of a quantifier-free formula."""
    f = simplify(nnf(f))
    names = list(order) + sorted(f.free_vars() - set(order))
    for v in names:
        if isinstance(f, Const):
            break
        if v in f.free_vars():
            f = eliminate_exists(v, f)
    assert isinstance(f, Const), f
    return f.value


# -- realizable clusters -------------------------------------------------------


def realizable_clusters(an: Analysis, samples: List[Dict[str, int]]) -> List[FrozenSet[int]]:
    """All nonempty C that are clusters for some shift valuation satisfying the sigma condition."""
    A = an.addresses
    n = len(A)
    if n == 0:
        return []
    witnessed: Set[FrozenSet[int]] = set()
    for mu in samples:
        witnessed.update(an.cluster_map(mu).values())
    witnessed_list = list(witnessed)
    order = sorted(range(n), key=lambda i: (A[i].kind == "M", i))
    context = conj(an.sigma_condition(), an.bounds(an.M))
    h = Term.var(H)
    results: List[FrozenSet[int]] = []

    def witness(inside: Set[int], outside: Set[int]) -> bool:
        return any(inside <= w and not (outside & w) for w in witnessed_list)

    def exact(inside: Set[int], outside: Set[int]) -> bool:
        f = conj(context, *(an.covers(A[i], h) for i in inside), *(neg(an.covers(A[i], h)) for i in outside))
        return exact_sat(f, [H])

    def rec(k: int, inside: Set[int], outside: Set[int]) -> None:
        if k == n:
            if inside:
                results.append(frozenset(inside))
            return
        i = order[k]
        for take in (True, False):
            ins = inside | {i} if take else inside
            outs = outside if take else outside | {i}
            if not ins:
                if k + 1 < n:
                    rec(k + 1, ins, outs)
                continue
            if witness(ins, outs) or exact(ins, outs):
                rec(k + 1, ins, outs)

    rec(0, set(), set())
    return results


# -- assembly ----------------------------------------------------------------


class _Search:
    """Depth-first search over cluster profiles.

    A node fixes, for a prefix of the realizable clusters, whether each one
    occurs.  It carries the exact set of shift valuations with that partial
    profile (refined one cluster formula at a time) and the cancelling
    constraints imposed so far on the non-shifting exponents.
    """

    def __init__(self, an: Analysis, leaf_limit: int = 100000):
        self.an = an
        self.leaf_limit = leaf_limit
        self.samples = an.sample_shifts()
        self.clusters = realizable_clusters(an, self.samples)
        self.m_context = conj(an.sigma_condition(), an.bounds(an.M))
        self.s_vars = an.S + an.free
        self._s_cache: Dict[FrozenSet, bool] = {}
        self.stats = {"addresses": len(an.addresses), "clusters": len(self.clusters), "leaves": 0, "restricts": 0}
        # clusters that always cancel impose nothing; those that never cancel must not occur
        self.forbidden: List[FrozenSet[int]] = []
        self.branching: List[FrozenSet[int]] = []
        for C in self.clusters:
            c = an.cancelling_formula(C)
            if c == FALSE:
                self.forbidden.append(C)
            elif c != TRUE:
                self.branching.append(C)
        maps = [set(an.cluster_map(mu).values()) for mu in self.samples]
        # clusters present in every sample first: they usually occur unconditionally
        self.branching.sort(key=lambda C: -sum(C in m for m in maps))
        log.debug("addresses %s", an.addresses)
        log.debug("realizable clusters %s", [sorted(c) for c in self.clusters])
        log.debug("forbidden %d, branching %d", len(self.forbidden), len(self.branching))

    def gamma(self, C) -> Formula:
        return self.an.cluster_formula(C)

    def restrict(self, region: SemilinearSet, f: Formula) -> SemilinearSet:
        self.stats["restricts"] += 1
        return restrict(region, f, self.an.M)

    def s_formula(self, cancels: List[FrozenSet[int]]) -> Formula:
        return conj(self.an.bounds(self.s_vars), *(self.an.cancelling_formula(C) for C in cancels))

    def s_sat(self, cancels: List[FrozenSet[int]]) -> bool:
        key = frozenset(cancels)
        if key not in self._s_cache:
            f = self.s_formula(cancels)
            names = self.s_vars + (self.an.M if self.an.overlap else [])
            if isinstance(f, Const):
                self._s_cache[key] = f.value
            else:
                self._s_cache[key] = any(conjunction_to_semilinear(cl, names) for cl in dnf(nnf(f)))
        return self._s_cache[key]

    def run(self):
        an = self.an
        region = formula_to_semilinear(self.m_context, an.M)
        for C in self.forbidden:
            if region.is_empty():
                return
            region = self.restrict(region, nnf(neg(self.gamma(C))))
        if region.is_empty():
            return
        yield from self._dfs(0, region, [])

    def _dfs(self, k: int, region: SemilinearSet, cancels: List[FrozenSet[int]]):
        if k == len(self.branching):
            self.stats["leaves"] += 1
            if self.stats["leaves"] > self.leaf_limit:
                raise SolverLimitError("too many cluster profiles")
            yield region, list(cancels)
            return
        C = self.branching[k]
        for present in (True, False):
            if present:
                ncancel = cancels + [C]
                if not self.s_sat(ncancel):
                    continue
                sub = self.restrict(region, self.gamma(C))
            else:
                ncancel = cancels
                sub = self.restrict(region, nnf(neg(self.gamma(C))))
            if sub.is_empty():
                continue
            yield from self._dfs(k + 1, sub, ncancel)

    def leaf_set(self, region: SemilinearSet, cancels: List[FrozenSet[int]]) -> SemilinearSet:
        an = self.an
        names = an.variables
        cols = an.M + self.s_vars
        s_formula = self.s_formula(cancels)
        if an.overlap:
            both = direct_sum(region, SemilinearSet.universe(len(self.s_vars)))
            both = restrict(both, s_formula, cols)
        else:
            both = direct_sum(region, formula_to_semilinear(s_formula, self.s_vars))
        return permute(both, [cols.index(v) for v in names])


class _FiniteSearch(_Search):
    """Subset-sum variant: the shift valuations form a finite cube, so enumerate them.

    Valuations are grouped by the set of clusters they produce; each group is
    one leaf, with the cancelling constraints of its clusters.
    """

    def __init__(self, an: Analysis, leaf_limit: int = 100000):
        self.an = an
        self.leaf_limit = leaf_limit
        self.s_vars = an.S + an.free
        self._s_cache: Dict[FrozenSet, bool] = {}
        self.stats = {"addresses": len(an.addresses), "clusters": 0, "leaves": 0, "restricts": 0, "enumerated": 0}

    def run(self):
        an = self.an
        groups: Dict[FrozenSet[FrozenSet[int]], List[Tuple[int, ...]]] = {}
        verdict: Dict[FrozenSet[int], Formula] = {}
        for mu in itertools.product((0, 1), repeat=len(an.M)):
            self.stats["enumerated"] += 1
            env = dict(zip(an.M, mu))
            if not an.sigma_ok(env):
                continue
            cancels = []
            for C in set(an.cluster_map(env).values()):
                if C not in verdict:
                    verdict[C] = an.cancelling_formula(C)
                if verdict[C] == FALSE:
                    break
                if verdict[C] != TRUE:
                    cancels.append(C)
            else:
                groups.setdefault(frozenset(cancels), []).append(mu)
        self.stats["clusters"] = len(verdict)
        for cancels, points in groups.items():
            self.stats["leaves"] += 1
            if self.stats["leaves"] > self.leaf_limit:
                raise SolverLimitError("too many cluster profiles")
            if self.s_sat(list(cancels)):
                yield SemilinearSet(len(an.M), [LinearSet(p) for p in points]), list(cancels)


FINITE_SHIFT_LIMIT = 16


def _search(e: ExponentExpression, group: WreathProduct, subset_sum: bool) -> _Search:
    an = Analysis(e, group, subset_sum)
    if subset_sum and len(an.M) <= FINITE_SHIFT_LIMIT:
        return _FiniteSearch(an)
    return _Search(an)


def solution_set(e: ExponentExpression, group: WreathProduct, subset_sum: bool = False, stats: Optional[dict] = None) -> SemilinearSet:
    """Sol(E) as a semilinear set over the variables of E in order of first occurrence."""
    search = _search(e, group, subset_sum)
    comps: List[LinearSet] = []
    for region, cancels in search.run():
        comps.extend(search.leaf_set(region, cancels).components)
    if stats is not None:
        stats.update(search.stats)
    return SemilinearSet(len(search.an.variables), comps)


def is_solvable(e: ExponentExpression, group: WreathProduct, subset_sum: bool = False, stats: Optional[dict] = None) -> Optional[Valuation]:
    """A solution of E = 1, or None if there is none."""
    search = _search(e, group, subset_sum)
    try:
        for region, cancels in search.run():
            s = search.leaf_set(region, cancels)
            if not s.is_empty():
                return dict(zip(search.an.variables, s.sample_point()))
        return None
    finally:
        if stats is not None:
            stats.update(search.stats)


# -- helpers over the normal form ---------------------------------------------


def cluster_formula(C: Iterable[Address], e: ExponentExpression, group: WreathProduct) -> Formula:
    an = Analysis(e, group)
    idx = [an.addresses.index(a) for a in C]
    return an.cluster_formula(idx)


def cancelling_formula(C: Iterable[Address], e: ExponentExpression, group: WreathProduct) -> Formula:
    an = Analysis(e, group)
    return an.cancelling_formula([an.addresses.index(a) for a in C])


def sigma_condition(e: ExponentExpression, group: WreathProduct) -> Formula:
    return Analysis(e, group).sigma_condition()


def brute_force_clusters(e: ExponentExpression, group: WreathProduct, mu: Mapping[str, int]) -> Dict[int, FrozenSet[Address]]:
    an = Analysis(e, group)
    return {h: frozenset(an.addresses[i] for i in C) for h, C in an.cluster_map(mu).items()}


def solution_set_via_profiles(e: ExponentExpression, group: WreathProduct, limit: int = 4) -> SemilinearSet:
    """Union over profiles P of K_P + (L_P and T), profiles restricted to realizable clusters.

    A profile P and its trace P' = P cut down to realizable clusters have the
    same L_P, and K_P is contained in K_P', so the union over all profiles equals
    the union over the subsets of realizable clusters.
    """
    an = Analysis(e, group)
    if len(an.addresses) > limit:
        raise SolverLimitError(f"{len(an.addresses)} addresses exceed the profile limit {limit}")
    all_c = [frozenset(c) for r in range(1, len(an.addresses) + 1) for c in itertools.combinations(range(len(an.addresses)), r)]
    context = conj(an.sigma_condition(), an.bounds(an.M))
    realizable = [C for C in all_c if exact_sat(conj(context, an.cluster_formula(C)))]
    s_vars = an.S + an.free + (an.M if an.overlap else [])
    names = an.variables
    comps: List[LinearSet] = []
    for r in range(len(realizable) + 1):
        for P in itertools.combinations(realizable, r):
            K = conj(an.bounds(s_vars), *(an.cancelling_formula(C) for C in P))
            L = conj(context, *(neg(an.cluster_formula(C)) for C in realizable if C not in P))
            if an.overlap:
                part = formula_to_semilinear(conj(K, L), names)
            else:
                both = direct_sum(formula_to_semilinear(L, an.M), formula_to_semilinear(K, s_vars))
                cols = an.M + s_vars
                part = permute(both, [cols.index(v) for v in names])
            comps.extend(part.components)
    return SemilinearSet(len(names), comps)
