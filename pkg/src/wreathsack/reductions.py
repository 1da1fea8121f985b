"""3-dimensional matching to knapsack over G wr Z."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence, Tuple, Union

from .abelian import AbelianGroupSpec
from .expr import Block, ExponentExpression, Word


@dataclass(frozen=True)
class ThreeDMInstance:
    q: int
    triples: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be positive")
        triples = tuple(tuple(int(v) for v in e) for e in self.triples)
        for e in triples:
            if len(e) != 3 or not all(1 <= v <= self.q for v in e):
                raise ValueError(f"triple {e} is not in [1,{self.q}]^3")
        if len(set(triples)) != len(triples):
            raise ValueError("duplicate triples")
        object.__setattr__(self, "triples", triples)

    @property
    def t(self) -> int:
        return len(self.triples)

    @classmethod
    def parse(cls, text: str) -> "ThreeDMInstance":
        lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise ValueError("empty 3DM file")
        q = int(lines[0])
        triples = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise ValueError(f"bad triple line {ln!r}")
            triples.append(tuple(int(p) for p in parts))
        return cls(q, tuple(triples))

    def to_text(self) -> str:
        return "\n".join([str(self.q)] + [" ".join(map(str, e)) for e in self.triples]) + "\n"


def _move(n: int) -> Word:
    return ("t",) * n if n >= 0 else ("t-",) * (-n)


def _inv(g: Sequence[str]) -> Word:
    return tuple(tok[:-1] if tok.endswith("-") else tok + "-" for tok in reversed(g))


def triple_word(q: int, l: int, e: Tuple[int, int, int], g: Sequence[str]) -> Word:
    """w_l: g at positions i, q+j, 2q+k and (3q+1)l, cursor back at 0."""
    i, j, k = e
    g = tuple(g)
    return (
        _move(i) + g + _move(q - i + j) + g + _move(q - j + k) + g
        + _move(-2 * q - k + (3 * q + 1) * l) + g + _move(-(3 * q + 1) * l)
    )


def reduce_3dm(
    inst: ThreeDMInstance,
    spec: Union[AbelianGroupSpec, str, None] = None,
    g: Optional[Sequence[str]] = None,
    binary_moves: bool = False,
) -> ExponentExpression:
    """Knapsack expression solvable iff the instance has a perfect matching.

    With ``binary_moves`` every cursor jump (a^(3q+1))^y_i is split into
    powers (a^((3q+1) 2^b))^(y_i_b), so that solutions stay valid when all
    variables are restricted to {0, 1}.
    """
    if spec is not None:
        spec = AbelianGroupSpec.parse(spec) if isinstance(spec, str) else spec
        if spec.ngens == 0:
            raise ValueError("the lamp group is trivial")
        if g is not None and spec.is_identity(spec.evaluate_word(list(g))):
            raise ValueError("g must be a non-identity element")
    g = ("g1",) if g is None else tuple(g)
    if not g:
        raise ValueError("g must be a non-identity element")
    q = inst.q
    g_inv = _inv(g)
    step = 3 * q + 1
    blocks: List[Block] = [Block(triple_word(q, l, e, g), f"x{l}") for l, e in enumerate(inst.triples, start=1)]
    fixed = (("t",) + g_inv) * (3 * q) + _move(-3 * q)
    bits = max(inst.t, 1).bit_length()

    def jumps(name: str, sign: int) -> List[Block]:
        if not binary_moves:
            return [Block(_move(sign * step), name)]
        return [Block(_move(sign * step * (1 << b)), f"{name}_{b}") for b in range(bits)]

    tail: List[Block] = []
    for i in range(1, q + 1):
        js = jumps(f"y{i}", 1)
        js[-1] = Block(js[-1].base, js[-1].var, g_inv)
        tail += js
    tail += jumps(f"y{q + 1}", -1)
    if blocks:
        blocks[-1] = Block(blocks[-1].base, blocks[-1].var, fixed)
        return ExponentExpression((), tuple(blocks + tail))
    return ExponentExpression(fixed, tuple(tail))


def brute_force_matching(inst: ThreeDMInstance) -> bool:
    for combo in itertools.combinations(inst.triples, inst.q):
        if all(len({e[c] for e in combo}) == inst.q for c in range(3)):
            return True
    return False


def decode_matching(inst: ThreeDMInstance, nu: Mapping[str, int], order: Optional[int] = None) -> List[Tuple[int, int, int]]:
    """Triples e_l with x_l = 1 modulo ord(g) (plain equality for infinite order)."""
    out = []
    for l, e in enumerate(inst.triples, start=1):
        n = nu.get(f"x{l}", 0)
        if (n % order == 1 % order) if order else n == 1:
            out.append(e)
    return out


def all_instances(q: int, max_t: int):
    """Every instance over [1,q]^3 with at most max_t triples."""
    cube = list(itertools.product(range(1, q + 1), repeat=3))
    for t in range(max_t + 1):
        for combo in itertools.combinations(cube, t):
            yield ThreeDMInstance(q, combo)
