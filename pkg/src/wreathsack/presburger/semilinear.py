"""Semilinear subsets of N^k and the conversions to and from Presburger formulas."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Div,
    Eq,
    Formula,
    Le,
    Or,
    Term,
    conj,
    disj,
    eq,
    exists,
    neg,
    nnf,
    nonneg,
    substitute,
)
from .polyhedra import conjunction_to_linear_sets
from .qe import eliminate_quantifiers, tighten

Vector = Tuple[int, ...]


class DimensionError(ValueError):
    pass


def default_vars(k: int) -> List[str]:
    return [f"x{i + 1}" for i in range(k)]


@lru_cache(maxsize=65536)
def _reach(rem: Vector, periods: Tuple[Vector, ...]) -> bool:
    if not any(rem):
        return True
    if not periods:
        return False
    p, rest = periods[0], periods[1:]
    cap = min(r // c for r, c in zip(rem, p) if c > 0)
    for lam in range(cap, -1, -1):
        nxt = tuple(r - lam * c for r, c in zip(rem, p))
        if _reach(nxt, rest):
            return True
    return False


@dataclass(frozen=True)
class LinearSet:
    base: Vector
    periods: Tuple[Vector, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(int(v) for v in self.base))
        object.__setattr__(self, "periods", tuple(tuple(int(v) for v in p) for p in self.periods))
        k = len(self.base)
        if any(len(p) != k for p in self.periods):
            raise DimensionError("period length differs from base length")
        if any(v < 0 for v in self.base) or any(v < 0 for p in self.periods for v in p):
            raise ValueError("linear sets live in N^k")

    @property
    def dim(self) -> int:
        return len(self.base)

    def member(self, v: Sequence[int]) -> bool:
        rem = tuple(a - b for a, b in zip(v, self.base))
        if any(r < 0 for r in rem):
            return False
        periods = tuple(sorted({p for p in self.periods if any(p)}, reverse=True))
        return _reach(rem, periods)

    def to_formula(self, names: Sequence[str]) -> Formula:
        lams = [f"_l{i}" for i in range(len(self.periods))]
        parts = []
        for j, x in enumerate(names):
            t = Term.var(x) - self.base[j]
            for lam, p in zip(lams, self.periods):
                if p[j]:
                    t = t - Term.var(lam, p[j])
            parts.append(eq(t))
        return exists(lams, conj(*parts, nonneg(*lams)))


class SemilinearSet:
    """Finite union of linear sets of a common dimension."""

    __slots__ = ("dim", "components")

    def __init__(self, dim: int, components: Iterable[LinearSet] = ()):
        self.dim = int(dim)
        comps = list(dict.fromkeys(components))
        for c in comps:
            if c.dim != self.dim:
                raise DimensionError(f"component of dimension {c.dim} in a set of dimension {self.dim}")
        self.components = tuple(comps)

    @classmethod
    def empty(cls, dim: int) -> "SemilinearSet":
        return cls(dim, ())

    @classmethod
    def universe(cls, dim: int) -> "SemilinearSet":
        units = [tuple(int(i == j) for i in range(dim)) for j in range(dim)]
        return cls(dim, [LinearSet((0,) * dim, units)])

    @classmethod
    def linear(cls, base: Sequence[int], periods: Sequence[Sequence[int]] = ()) -> "SemilinearSet":
        ls = LinearSet(tuple(base), tuple(tuple(p) for p in periods))
        return cls(ls.dim, [ls])

    def __repr__(self) -> str:
        return f"SemilinearSet({self.dim}, {list(self.components)!r})"

    def __contains__(self, v) -> bool:
        return self.member(v)

    def _check(self, other: "SemilinearSet") -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimensions {self.dim} and {other.dim} differ")

    def member(self, v: Sequence[int]) -> bool:
        if len(v) != self.dim:
            raise DimensionError(f"vector of length {len(v)} for dimension {self.dim}")
        return any(c.member(v) for c in self.components)

    def is_empty(self) -> bool:
        return not self.components

    def sample_point(self) -> Optional[Vector]:
        return self.components[0].base if self.components else None

    def union(self, other: "SemilinearSet") -> "SemilinearSet":
        self._check(other)
        return SemilinearSet(self.dim, self.components + other.components)

    def intersection(self, other: "SemilinearSet") -> "SemilinearSet":
        self._check(other)
        if self.is_empty() or other.is_empty():
            return SemilinearSet.empty(self.dim)
        names = default_vars(self.dim)
        return formula_to_semilinear(conj(self.to_formula(names), other.to_formula(names)), names)

    def complement(self) -> "SemilinearSet":
        names = default_vars(self.dim)
        return formula_to_semilinear(neg(self.to_formula(names)), names)

    def difference(self, other: "SemilinearSet") -> "SemilinearSet":
        self._check(other)
        if other.is_empty() or self.is_empty():
            return self
        names = default_vars(self.dim)
        return formula_to_semilinear(conj(self.to_formula(names), neg(other.to_formula(names))), names)

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def to_formula(self, names: Optional[Sequence[str]] = None) -> Formula:
        names = list(names) if names is not None else default_vars(self.dim)
        if len(names) != self.dim:
            raise DimensionError("one name per coordinate is required")
        return disj(*(c.to_formula(names) for c in self.components))

    def points(self, bound: int) -> List[Vector]:
        """Members inside the box [0, bound]^dim."""
        return [v for v in itertools.product(range(bound + 1), repeat=self.dim) if self.member(v)]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "components": [
                {"base": list(c.base), "periods": [list(p) for p in c.periods]} for c in self.components
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SemilinearSet":
        try:
            dim = int(data["dim"])
            comps = [LinearSet(tuple(c["base"]), tuple(tuple(p) for p in c.get("periods", []))) for c in data["components"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed semilinear set: {exc}") from exc
        return cls(dim, comps)

    @classmethod
    def from_json(cls, text: str) -> "SemilinearSet":
        return cls.from_dict(json.loads(text))


# -- formula -> semilinear -----------------------------------------------------


def dnf(f: Formula) -> List[List[Atom]]:
    """Disjunctive normal form of a quantifier-free NNF formula, dropping unsatisfiable bound clashes."""
    if isinstance(f, Const):
        return [[]] if f.value else []
    if isinstance(f, Atom):
        return [[f]]
    if isinstance(f, Or):
        out: List[List[Atom]] = []
        for a in f.args:
            out.extend(dnf(a))
        return out
    if isinstance(f, And):
        # atoms first, they prune the product early
        args = sorted(f.args, key=lambda a: not isinstance(a, Atom))
        acc: List[List[Atom]] = [[]]
        for a in args:
            rights = dnf(a)
            seen: Dict[FrozenSet[Atom], List[Atom]] = {}
            for left in acc:
                for right in rights:
                    merged = _merge(left + right)
                    if merged is not None:
                        seen.setdefault(frozenset(merged), merged)
            acc = _drop_subsumed(seen)
            if not acc:
                break
        return acc
    raise TypeError(f"not quantifier-free NNF: {f!r}")


def _drop_subsumed(clauses: Dict[FrozenSet[Atom], List[Atom]]) -> List[List[Atom]]:
    """Drop clauses containing all atoms of a smaller clause (they add no points)."""
    keys = sorted(clauses, key=len)
    if len(keys) > 2000:
        return [clauses[k] for k in keys]
    kept: List[FrozenSet[Atom]] = []
    for k in keys:
        if not any(s <= k for s in kept):
            kept.append(k)
    return [clauses[k] for k in kept]


def _merge(atoms: List[Atom]) -> Optional[List[Atom]]:
    g = tighten(atoms)
    if g == FALSE:
        return None
    if g == TRUE:
        return []
    if isinstance(g, And):
        return list(g.args)
    return [g]


def _row(term: Term, index: Dict[str, int], n: int) -> List[int]:
    row = [0] * n
    for v, c in term.coeffs:
        row[index[v]] = c
    return row


def conjunction_to_semilinear(atoms: Sequence[Atom], names: Sequence[str]) -> List[LinearSet]:
    index = {v: i for i, v in enumerate(names)}
    n = len(names)
    eqs, les, divs = [], [], []
    for a in atoms:
        row = _row(a.term, index, n)
        if isinstance(a, Eq):
            eqs.append((row, a.term.const))
        elif isinstance(a, Le):
            les.append((row, a.term.const))
        elif isinstance(a, Div):
            divs.append((a.modulus, row, a.term.const))
    return [LinearSet(b, tuple(p)) for b, p in conjunction_to_linear_sets(n, eqs, les, divs)]


def _sign_atom(a: Atom) -> Formula:
    """Decide atoms whose truth follows from all variables being non-negative."""
    cs = [c for _, c in a.term.coeffs]
    k = a.term.const
    if isinstance(a, Le):
        if all(c >= 0 for c in cs) and k > 0:
            return FALSE
        if all(c <= 0 for c in cs) and k <= 0:
            return TRUE
    elif isinstance(a, Eq):
        if (all(c >= 0 for c in cs) and k > 0) or (all(c <= 0 for c in cs) and k < 0):
            return FALSE
    return a


def simplify_nonneg(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return _sign_atom(f)
    if isinstance(f, And):
        return conj(*(simplify_nonneg(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(simplify_nonneg(a) for a in f.args))
    return f


def formula_to_semilinear(f: Formula, names: Sequence[str]) -> SemilinearSet:
    """Set of natural assignments to ``names`` satisfying ``f``."""
    names = list(names)
    extra = f.free_vars() - set(names)
    if extra:
        raise ValueError(f"free variables outside the variable list: {sorted(extra)}")
    qf = simplify_nonneg(nnf(eliminate_quantifiers(conj(f, nonneg(*names)))))
    comps: List[LinearSet] = []
    for clause in dnf(qf):
        comps.extend(conjunction_to_semilinear(clause, names))
    return SemilinearSet(len(names), comps)


def restrict(s: SemilinearSet, f: Formula, names: Sequence[str]) -> SemilinearSet:
    """Members of ``s`` satisfying the formula ``f`` over ``names``.

    Each component b + N P is handled in its own coordinates: substituting
    x = b + P lam turns f into a formula over lam >= 0, whose solution set maps
    back linearly.
    """
    names = list(names)
    if f == TRUE:
        return s
    comps: List[LinearSet] = []
    for c in s.components:
        lams = [f"@l{j}" for j in range(len(c.periods))]
        env = {}
        for i, x in enumerate(names):
            t = Term.constant(c.base[i])
            for lam, p in zip(lams, c.periods):
                if p[i]:
                    t = t + Term.var(lam, p[i])
            env[x] = t
        g = f
        for x in names:
            if x in g.free_vars():
                g = substitute(g, x, env[x])
        if not lams:
            if formula_to_semilinear(g, []).components:
                comps.append(c)
            continue
        sub = formula_to_semilinear(g, lams)
        for lc in sub.components:
            base = tuple(c.base[i] + sum(v * p[i] for v, p in zip(lc.base, c.periods)) for i in range(len(names)))
            periods = tuple(
                tuple(sum(v * p[i] for v, p in zip(q, c.periods)) for i in range(len(names))) for q in lc.periods
            )
            comps.append(LinearSet(base, tuple(p for p in periods if any(p))))
    return SemilinearSet(s.dim, comps)


def direct_sum(a: SemilinearSet, b: SemilinearSet) -> SemilinearSet:
    """Product set on concatenated coordinates."""
    comps = []
    for x, y in itertools.product(a.components, b.components):
        za, zb = (0,) * a.dim, (0,) * b.dim
        periods = tuple(p + zb for p in x.periods) + tuple(za + q for q in y.periods)
        comps.append(LinearSet(x.base + y.base, periods))
    return SemilinearSet(a.dim + b.dim, comps)


def permute(s: SemilinearSet, order: Sequence[int]) -> SemilinearSet:
    """Reorder coordinates: new coordinate i is old coordinate order[i]."""
    def pick(v):
        return tuple(v[i] for i in order)

    return SemilinearSet(len(order), [LinearSet(pick(c.base), tuple(pick(p) for p in c.periods)) for c in s.components])
