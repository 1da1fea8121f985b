"""The wreath product G wr Z for a finitely generated abelian group G."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Tuple, Union

from .abelian import AbelianElement, AbelianGroupSpec, TokenError


@dataclass(frozen=True)
class WreathElement:
    """Pair (f, d): finitely supported f from Z to G and cursor shift d."""

    support: Tuple[Tuple[int, AbelianElement], ...]
    shift: int

    def as_dict(self) -> Dict[int, AbelianElement]:
        return dict(self.support)

    def positions(self) -> List[int]:
        return [p for p, _ in self.support]

    def to_dict(self) -> dict:
        return {"support": [[p, v.to_list()] for p, v in self.support], "shift": self.shift}

    def __repr__(self) -> str:
        body = ", ".join(f"{p}: {v!r}" for p, v in self.support)
        return f"WreathElement({{{body}}}, shift={self.shift})"


def precedes(h1: int, h2: int, d: int) -> bool:
    """h1 is below h2 in the order induced by d: h1 = n*d + h2 for some n >= 0."""
    diff = h1 - h2
    if d == 0:
        return diff == 0
    return diff % d == 0 and diff // d >= 0


class WreathProduct:
    """G wr Z with the generating set of G plus the cursor letter ``t``."""

    def __init__(self, base: Union[AbelianGroupSpec, str]):
        self.base = AbelianGroupSpec.parse(base) if isinstance(base, str) else base

    def __repr__(self) -> str:
        return f"WreathProduct({self.base})"

    def __eq__(self, other) -> bool:
        return isinstance(other, WreathProduct) and other.base == self.base

    def __hash__(self) -> int:
        return hash(("wreath", self.base))

    def make(self, values: Mapping[int, AbelianElement], shift: int = 0) -> WreathElement:
        G = self.base
        items = tuple(sorted((int(p), v) for p, v in values.items() if not G.is_identity(v)))
        return WreathElement(items, int(shift))

    def identity(self) -> WreathElement:
        return WreathElement((), 0)

    def is_identity(self, g: WreathElement) -> bool:
        return not g.support and g.shift == 0

    def _check(self, g: WreathElement) -> None:
        for _, v in g.support:
            if len(v.free) != self.base.rank or len(v.torsion) != len(self.base.torsion_orders):
                raise ValueError(f"element {g!r} is over a different lamp group than {self.base}")

    def multiply(self, g1: WreathElement, g2: WreathElement) -> WreathElement:
        self._check(g1)
        self._check(g2)
        G = self.base
        vals = dict(g1.support)
        for p, v in g2.support:
            q = p + g1.shift
            vals[q] = G.add(vals[q], v) if q in vals else v
        return self.make(vals, g1.shift + g2.shift)

    def inverse(self, g: WreathElement) -> WreathElement:
        G = self.base
        return self.make({p - g.shift: G.negate(v) for p, v in g.support}, -g.shift)

    def sigma(self, g: WreathElement) -> int:
        return g.shift

    def tau_at(self, g: WreathElement, position: int) -> AbelianElement:
        for p, v in g.support:
            if p == position:
                return v
        return self.base.identity()

    def support_interval(self, g: WreathElement) -> Tuple[int, int]:
        pts = [0, g.shift] + g.positions()
        return min(pts), max(pts)

    # -- words

    def token_value(self, token: str) -> WreathElement:
        if token == "t":
            return WreathElement((), 1)
        if token == "t-":
            return WreathElement((), -1)
        return self.make({0: self.base.token_value(token)}, 0)

    def evaluate_word(self, tokens: Union[str, Iterable[str]]) -> WreathElement:
        if isinstance(tokens, str):
            tokens = tokens.split()
        G = self.base
        vals: Dict[int, AbelianElement] = {}
        cursor = 0
        for tok in tokens:
            if tok == "t":
                cursor += 1
            elif tok == "t-":
                cursor -= 1
            else:
                v = G.token_value(tok)
                vals[cursor] = G.add(vals[cursor], v) if cursor in vals else v
        return self.make(vals, cursor)

    def inverse_token(self, token: str) -> str:
        if token in ("t", "t-"):
            return "t-" if token == "t" else "t"
        return self.base.inverse_token(token)

    def generator_tokens(self) -> List[str]:
        return self.base.generator_tokens() + ["t"]

    def has_infinite_order_element(self) -> bool:
        return True

    def infinite_order_token(self) -> str:
        return "t"

    # -- powers

    def power(self, g: WreathElement, m: int, position: int) -> AbelianElement:
        """Value of g^m at one position without expanding g^m."""
        G = self.base
        d = g.shift
        acc = G.identity()
        if m <= 0:
            return acc
        for p, v in g.support:
            if d == 0:
                if p == position:
                    acc = G.add(acc, G.scale(v, m))
            elif precedes(p, position, -d) and (p - position) // -d < m:
                # position = p + i*d with 0 <= i < m
                acc = G.add(acc, v)
        return acc

    def full_power(self, g: WreathElement, m: int) -> WreathElement:
        """g^m, sweeping each residue class of positions modulo |shift|."""
        if m < 0:
            raise ValueError("exponent must be non-negative")
        G = self.base
        d = g.shift
        if m == 0:
            return self.identity()
        if d == 0:
            return self.make({p: G.scale(v, m) for p, v in g.support}, 0)
        step = abs(d)
        events: Dict[int, List[Tuple[int, int, AbelianElement]]] = defaultdict(list)
        for p, v in g.support:
            end = p + (m - 1) * d
            lo, hi = min(p, end), max(p, end)
            events[p % step].append((lo, 1, v))
            events[p % step].append((hi + step, -1, v))
        vals: Dict[int, AbelianElement] = {}
        for evs in events.values():
            evs.sort(key=lambda e: e[0])
            running = G.identity()
            i = 0
            while i < len(evs):
                pos = evs[i][0]
                while i < len(evs) and evs[i][0] == pos:
                    _, sgn, v = evs[i]
                    running = G.add(running, v if sgn > 0 else G.negate(v))
                    i += 1
                if i < len(evs) and not G.is_identity(running):
                    for q in range(pos, evs[i][0], step):
                        vals[q] = running
        return self.make(vals, m * d)

    def naive_power(self, g: WreathElement, m: int) -> WreathElement:
        acc = self.identity()
        for _ in range(m):
            acc = self.multiply(acc, g)
        return acc


def evaluate_word(base: Union[AbelianGroupSpec, str], tokens) -> WreathElement:
    return WreathProduct(base).evaluate_word(tokens)


__all__ = ["WreathElement", "WreathProduct", "evaluate_word", "precedes", "TokenError"]
