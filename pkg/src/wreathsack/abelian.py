"""Finitely generated abelian groups Z^r + Z/d_1 + ... + Z/d_m and their exponent equations."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .presburger import SemilinearSet, Term, conj, div, eq, formula_to_semilinear
from .presburger.formula import Formula

INFINITY = math.inf


class GroupSpecError(ValueError):
    pass


class TokenError(ValueError):
    pass


@dataclass(frozen=True)
class AbelianElement:
    free: Tuple[int, ...]
    torsion: Tuple[int, ...]

    def __repr__(self) -> str:
        parts = [", ".join(map(str, p)) for p in (self.free, self.torsion) if p]
        return f"({'; '.join(parts)})"

    def to_list(self) -> List[int]:
        return list(self.free) + list(self.torsion)


_TOKEN = re.compile(r"^g(\d+)(-?)$")


@dataclass(frozen=True)
class AbelianGroupSpec:
    rank: int = 0
    torsion_orders: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion_orders", tuple(int(d) for d in self.torsion_orders))
        if self.rank < 0:
            raise GroupSpecError("rank must be non-negative")
        if any(d < 2 for d in self.torsion_orders):
            raise GroupSpecError("torsion orders must be at least 2")

    # -- parsing and printing

    @classmethod
    def parse(cls, text: str) -> "AbelianGroupSpec":
        text = text.strip()
        if not text or text in ("1", "0", "trivial"):
            return cls(0, ())
        rank = 0
        orders: List[int] = []
        for factor in re.split(r"\s+x\s+|\s*⊕\s*|\s*\+\s*", text):
            factor = factor.replace(" ", "").replace("ℤ", "Z")
            m = re.fullmatch(r"Z(?:\^(\d+))?", factor)
            if m:
                rank += int(m.group(1) or 1)
                continue
            m = re.fullmatch(r"Z/(\d+)(?:Z)?", factor) or re.fullmatch(r"Z_?(\d+)", factor)
            if m:
                orders.append(int(m.group(1)))
                continue
            raise GroupSpecError(f"cannot parse group factor {factor!r}")
        return cls(rank, tuple(orders))

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts += [f"Z/{d}" for d in self.torsion_orders]
        return " x ".join(parts) if parts else "1"

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion_orders)

    # -- elements

    def element(self, free: Sequence[int] = (), torsion: Sequence[int] = ()) -> AbelianElement:
        free = tuple(int(v) for v in free) or (0,) * self.rank
        torsion = tuple(int(v) for v in torsion) or (0,) * len(self.torsion_orders)
        if len(free) != self.rank or len(torsion) != len(self.torsion_orders):
            raise GroupSpecError(f"element shape does not match {self}")
        return AbelianElement(free, tuple(t % d for t, d in zip(torsion, self.torsion_orders)))

    def from_vector(self, v: Sequence[int]) -> AbelianElement:
        return self.element(v[: self.rank], v[self.rank :])

    def identity(self) -> AbelianElement:
        return AbelianElement((0,) * self.rank, (0,) * len(self.torsion_orders))

    def is_identity(self, a: AbelianElement) -> bool:
        return not any(a.free) and not any(a.torsion)

    def _check(self, a: AbelianElement) -> None:
        if len(a.free) != self.rank or len(a.torsion) != len(self.torsion_orders):
            raise GroupSpecError(f"element {a!r} does not belong to {self}")

    def add(self, a: AbelianElement, b: AbelianElement) -> AbelianElement:
        self._check(a)
        self._check(b)
        return AbelianElement(
            tuple(x + y for x, y in zip(a.free, b.free)),
            tuple((x + y) % d for x, y, d in zip(a.torsion, b.torsion, self.torsion_orders)),
        )

    def negate(self, a: AbelianElement) -> AbelianElement:
        self._check(a)
        return AbelianElement(tuple(-x for x in a.free), tuple((-x) % d for x, d in zip(a.torsion, self.torsion_orders)))

    def scale(self, a: AbelianElement, m: int) -> AbelianElement:
        return AbelianElement(
            tuple(m * x for x in a.free), tuple((m * x) % d for x, d in zip(a.torsion, self.torsion_orders))
        )

    def order(self, a: AbelianElement) -> Union[int, float]:
        self._check(a)
        if any(a.free):
            return INFINITY
        n = 1
        for x, d in zip(a.torsion, self.torsion_orders):
            k = d // math.gcd(d, x)
            n = n * k // math.gcd(n, k)
        return n

    def generator(self, index: int) -> AbelianElement:
        if not 1 <= index <= self.ngens:
            raise TokenError(f"generator g{index} does not exist in {self}")
        v = [0] * self.ngens
        v[index - 1] = 1
        return self.from_vector(v)

    def token_value(self, token: str) -> AbelianElement:
        m = _TOKEN.match(token)
        if not m:
            raise TokenError(f"unknown token {token!r}")
        g = self.generator(int(m.group(1)))
        return self.negate(g) if m.group(2) else g

    def evaluate_word(self, tokens: Union[str, Iterable[str]]) -> AbelianElement:
        if isinstance(tokens, str):
            tokens = tokens.split()
        acc = self.identity()
        for tok in tokens:
            acc = self.add(acc, self.token_value(tok))
        return acc

    # group interface shared with the wreath product
    multiply = add
    inverse = negate

    def full_power(self, a: AbelianElement, m: int) -> AbelianElement:
        return self.scale(a, m)

    def inverse_token(self, token: str) -> str:
        self.token_value(token)
        return token[:-1] if token.endswith("-") else token + "-"

    def generator_tokens(self) -> List[str]:
        return [f"g{i}" for i in range(1, self.ngens + 1)]

    def has_infinite_order_element(self) -> bool:
        return self.rank > 0

    def infinite_order_token(self) -> str:
        if not self.rank:
            raise GroupSpecError(f"{self} is a torsion group")
        return "g1"


# -- exponent equations ------------------------------------------------------


Factor = Tuple[Sequence[str], Optional[str]]


def _factors(expression) -> List[Factor]:
    if hasattr(expression, "factors"):
        return list(expression.factors())
    return list(expression)


def linearize(spec: AbelianGroupSpec, expression) -> Tuple[List[Term], List[Tuple[int, Term]]]:
    """Coordinates of the value of an exponent expression as linear terms in its variables.

    Returns the r free-coordinate terms (each must vanish) and the m torsion
    terms paired with their modulus (each must be divisible by it).
    """
    free = [Term() for _ in range(spec.rank)]
    tors = [Term() for _ in spec.torsion_orders]
    for tokens, var in _factors(expression):
        g = spec.evaluate_word(tokens)
        for i, c in enumerate(g.free):
            if c:
                free[i] = free[i] + (Term.var(var, c) if var else Term.constant(c))
        for j, c in enumerate(g.torsion):
            if c:
                tors[j] = tors[j] + (Term.var(var, c) if var else Term.constant(c))
    return free, list(zip(spec.torsion_orders, tors))


def expeq_formula(spec: AbelianGroupSpec, system: Iterable) -> Formula:
    parts = []
    for e in system:
        free, tors = linearize(spec, e)
        parts += [eq(t) for t in free]
        parts += [div(d, t) for d, t in tors]
    return conj(*parts)


def expression_variables(system: Iterable) -> List[str]:
    seen: List[str] = []
    for e in system:
        for _, var in _factors(e):
            if var and var not in seen:
                seen.append(var)
    return seen


def solve_expeq(spec: AbelianGroupSpec, system: Sequence, variables: Optional[Sequence[str]] = None) -> SemilinearSet:
    """Natural solutions of a system of exponent expressions ``E_i = 1`` over the group."""
    system = list(system)
    names = list(variables) if variables is not None else expression_variables(system)
    missing = set(expression_variables(system)) - set(names)
    if missing:
        raise ValueError(f"variables missing from the variable list: {sorted(missing)}")
    return formula_to_semilinear(expeq_formula(spec, system), names)
