"""Cell expressions, marked cells and Cayley representations of rigid expressions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from ..abelian import AbelianElement, AbelianGroupSpec
from ..expr import ExponentExpression, Word, parse_expression
from ..presburger import Term, conj, div, eq
from ..wreath import WreathProduct


@dataclass(frozen=True)
class CellExpr:
    """Knapsack expression over abelian G in normal form: const + sum of coeff * var."""

    const: AbelianElement
    coeffs: Tuple[Tuple[str, AbelianElement], ...] = ()

    @staticmethod
    def constant(g: AbelianElement) -> "CellExpr":
        return CellExpr(g, ())

    @staticmethod
    def power(g: AbelianElement, var: str, G: AbelianGroupSpec) -> "CellExpr":
        return CellExpr(G.identity(), () if G.is_identity(g) else ((var, g),))

    @property
    def variables(self) -> List[str]:
        return [v for v, _ in self.coeffs]

    def is_identity(self, G: AbelianGroupSpec) -> bool:
        return G.is_identity(self.const) and not self.coeffs

    def add(self, other: "CellExpr", G: AbelianGroupSpec) -> "CellExpr":
        coeffs: Dict[str, AbelianElement] = dict(self.coeffs)
        for v, g in other.coeffs:
            coeffs[v] = G.add(coeffs[v], g) if v in coeffs else g
        items = tuple(sorted((v, g) for v, g in coeffs.items() if not G.is_identity(g)))
        return CellExpr(G.add(self.const, other.const), items)

    def substitute(self, nu: Mapping[str, int], G: AbelianGroupSpec) -> "CellExpr":
        const = self.const
        rest = []
        for v, g in self.coeffs:
            if v in nu:
                const = G.add(const, G.scale(g, nu[v]))
            else:
                rest.append((v, g))
        return CellExpr(const, tuple(rest))

    def value(self, nu: Mapping[str, int], G: AbelianGroupSpec) -> AbelianElement:
        return self.substitute({v: nu.get(v, 0) for v in self.variables}, G).const

    def constraints(self, G: AbelianGroupSpec):
        """Presburger atoms saying the cell evaluates to the identity."""
        parts = []
        for j in range(G.rank):
            t = Term.constant(self.const.free[j])
            for v, g in self.coeffs:
                t = t + Term.var(v, g.free[j])
            parts.append(eq(t))
        for j, d in enumerate(G.torsion_orders):
            t = Term.constant(self.const.torsion[j])
            for v, g in self.coeffs:
                t = t + Term.var(v, g.torsion[j])
            parts.append(div(d, t))
        return conj(*parts)

    def text(self, G: AbelianGroupSpec) -> str:
        parts = []
        w = element_word(self.const, G)
        if w:
            parts.append(" ".join(w))
        for v, g in self.coeffs:
            parts.append(f"({' '.join(element_word(g, G))})^{v}")
        return " ".join(parts) if parts else "1"


def element_word(g: AbelianElement, G: AbelianGroupSpec) -> List[str]:
    """Shortest-ish word for g: each coordinate as a power of its generator."""
    out: List[str] = []
    for i, c in enumerate(tuple(g.free) + tuple(g.torsion), start=1):
        tok = f"g{i}" if c > 0 else f"g{i}-"
        out += [tok] * abs(c)
    return out


@dataclass(frozen=True)
class Marked:
    expr: CellExpr
    top: bool = False
    bottom: bool = False

    def text(self, G: AbelianGroupSpec) -> str:
        return ("^" if self.top else "") + ("_" if self.bottom else "") + self.expr.text(G)

    def unmarked(self) -> "Marked":
        return Marked(self.expr)


class CellSyntaxError(ValueError):
    pass


def parse_cell(text: str, G: AbelianGroupSpec) -> Marked:
    s = text.strip()
    top = bottom = False
    while s[:1] in ("^", "_"):
        if s[0] == "^":
            top = True
        else:
            bottom = True
        s = s[1:]
    s = s.strip()
    acc = CellExpr.constant(G.identity())
    if s in ("", "1"):
        return Marked(acc, top, bottom)
    try:
        e = parse_expression(s)
        for word, var in e.factors():
            g = G.evaluate_word(list(word))
            acc = acc.add(CellExpr.power(g, var, G) if var else CellExpr.constant(g), G)
    except ValueError as exc:
        raise CellSyntaxError(f"bad cell {text!r}: {exc}") from exc
    return Marked(acc, top, bottom)


def one(G: AbelianGroupSpec, top: bool = False, bottom: bool = False) -> Marked:
    return Marked(CellExpr.constant(G.identity()), top, bottom)


@dataclass(frozen=True)
class CayleyRepresentation:
    """Cells for the positions start, start+1, ... with one top and one bottom mark."""

    cells: Tuple[Marked, ...]
    start: int

    def __post_init__(self):
        tops = [i for i, c in enumerate(self.cells) if c.top]
        bots = [i for i, c in enumerate(self.cells) if c.bottom]
        if len(tops) != 1 or len(bots) != 1:
            raise ValueError("a Cayley representation has exactly one top and one bottom mark")

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def interval(self) -> Tuple[int, int]:
        return self.start, self.start + len(self.cells) - 1

    @property
    def top_position(self) -> int:
        return self.start + next(i for i, c in enumerate(self.cells) if c.top)

    @property
    def bottom_position(self) -> int:
        return self.start + next(i for i, c in enumerate(self.cells) if c.bottom)

    def cell_at(self, position: int) -> Marked:
        return self.cells[position - self.start]

    def texts(self, G: AbelianGroupSpec) -> List[str]:
        return [c.text(G) for c in self.cells]


# -- factors of an expression ---------------------------------------------------


@dataclass(frozen=True)
class Factor:
    """One power block u^x (var set) or one constant word."""

    word: Word
    var: Optional[str] = None


def expression_factors(e: ExponentExpression) -> List[Factor]:
    """Power blocks and non-empty constant words, left to right (at least one factor)."""
    out = [Factor(tuple(w), v) for w, v in e.factors() if v is not None or w]
    return out or [Factor((), None)]


def split_variables(e: ExponentExpression, group: WreathProduct) -> Tuple[List[str], List[str]]:
    """(X0, X1): variables of non-shifting blocks and of shifting blocks."""
    x0, x1 = [], []
    for b in e.blocks:
        target = x1 if group.evaluate_word(list(b.base)).shift != 0 else x0
        if b.var not in target:
            target.append(b.var)
    return [v for v in x0 if v not in x1], x1


def cayley_representation(
    e: ExponentExpression,
    group: WreathProduct,
    nu_partial: Mapping[str, int] = None,
    interval: Optional[Tuple[int, int]] = None,
) -> CayleyRepresentation:
    """Cayley representation of E after fixing the shifting variables by ``nu_partial``.

    The default interval is the smallest one supporting every valuation of the
    remaining variables.
    """
    G = group.base
    nu_partial = dict(nu_partial or {})
    cells: Dict[int, CellExpr] = {}
    cursor = 0

    def put(pos: int, c: CellExpr) -> None:
        cells[pos] = cells[pos].add(c, G) if pos in cells else c

    for f in expression_factors(e):
        g = group.evaluate_word(list(f.word))
        if f.var is None or f.var in nu_partial:
            if f.var is not None:
                if nu_partial[f.var] < 0:
                    raise ValueError("exponents are natural numbers")
                g = group.full_power(g, nu_partial[f.var])
            for p, v in g.support:
                put(cursor + p, CellExpr.constant(v))
            cursor += g.shift
        else:
            if g.shift != 0:
                raise ValueError(f"expression is not rigid: {f.var} needs a value")
            for p, v in g.support:
                put(cursor + p, CellExpr.power(v, f.var, G))
    d = cursor
    used = [p for p, c in cells.items() if not c.is_identity(G)] + [0, d]
    lo, hi = min(used), max(used)
    if interval is not None:
        a, b = interval
        if a > lo or b < hi:
            raise ValueError(f"interval [{a},{b}] does not support [{lo},{hi}]")
        lo, hi = a, b
    ident = CellExpr.constant(G.identity())
    out = tuple(Marked(cells.get(p, ident), p == 0, p == d) for p in range(lo, hi + 1))
    return CayleyRepresentation(out, lo)
