"""Exponent and knapsack expressions: parsing, evaluation, normalization and oracles."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

Token = Union[str, Tuple[str, ...]]
Word = Tuple[Token, ...]
Valuation = Dict[str, int]


class ExpressionSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


@dataclass(frozen=True)
class Block:
    base: Word
    var: str
    suffix: Word = ()


@dataclass(frozen=True)
class ExponentExpression:
    """v0 u1^x1 v1 ... uk^xk vk."""

    prefix: Word = ()
    blocks: Tuple[Block, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(
            self, "blocks", tuple(b if isinstance(b, Block) else Block(tuple(b[0]), b[1], tuple(b[2]) if len(b) > 2 else ()) for b in self.blocks)
        )

    @property
    def depth(self) -> int:
        return len(self.blocks)

    def __len__(self) -> int:
        return len(self.prefix) + sum(len(b.base) + len(b.suffix) for b in self.blocks)

    @property
    def variables(self) -> List[str]:
        return list(dict.fromkeys(b.var for b in self.blocks))

    def is_knapsack(self) -> bool:
        return len(self.variables) == self.depth

    def repeated_variables(self) -> List[str]:
        seen, rep = set(), []
        for b in self.blocks:
            if b.var in seen and b.var not in rep:
                rep.append(b.var)
            seen.add(b.var)
        return rep

    def words(self) -> List[Word]:
        """v0, v1, ..., vk."""
        return [self.prefix] + [b.suffix for b in self.blocks]

    def factors(self) -> List[Tuple[Word, Optional[str]]]:
        out: List[Tuple[Word, Optional[str]]] = [(self.prefix, None)]
        for b in self.blocks:
            out.append((b.base, b.var))
            out.append((b.suffix, None))
        return out

    def is_normalized(self) -> bool:
        if not self.blocks:
            return True
        return not self.prefix and all(not b.suffix for b in self.blocks[:-1])

    def rename(self, mapping: Mapping[str, str]) -> "ExponentExpression":
        return ExponentExpression(self.prefix, tuple(Block(b.base, mapping.get(b.var, b.var), b.suffix) for b in self.blocks))

    def __str__(self) -> str:
        return print_expression(self)


# -- text syntax -------------------------------------------------------------

_LEX = re.compile(r"\s*(?:(\()|(\))|(\^)|([^\s()^]+))")
_VAR = re.compile(r"^[A-Za-z_][A-Za-z0-9_.#']*$")


def _token_text(tok: Token) -> str:
    if isinstance(tok, tuple):
        return "[" + ",".join(tok) + "]"
    return tok


def _token_parse(text: str) -> Token:
    if text.startswith("[") and text.endswith("]"):
        return tuple(text[1:-1].split(","))
    return text


def _word_text(w: Word) -> str:
    return " ".join(_token_text(t) for t in w)


def print_expression(e: ExponentExpression) -> str:
    parts = []
    if e.prefix:
        parts.append(_word_text(e.prefix))
    for b in e.blocks:
        parts.append(f"({_word_text(b.base)})^{b.var}")
        if b.suffix:
            parts.append(_word_text(b.suffix))
    return " ".join(parts)


def parse_expression(text: str) -> ExponentExpression:
    """Parse ``word ( '(' word ')' '^' var word )*``."""
    lexemes: List[Tuple[str, str, int]] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _LEX.match(text, pos)
        if not m:
            raise ExpressionSyntaxError("unexpected character", pos)
        start = m.start(m.lastindex)
        kind = {1: "(", 2: ")", 3: "^", 4: "w"}[m.lastindex]
        lexemes.append((kind, m.group(m.lastindex), start))
        pos = m.end()
    i = 0

    def word() -> Word:
        nonlocal i
        out = []
        while i < len(lexemes) and lexemes[i][0] == "w":
            out.append(_token_parse(lexemes[i][1]))
            i += 1
        return tuple(out)

    def expect(kind: str) -> Tuple[str, str, int]:
        nonlocal i
        if i >= len(lexemes):
            raise ExpressionSyntaxError(f"expected {kind!r}, found end of input", len(text))
        lx = lexemes[i]
        if lx[0] != kind:
            raise ExpressionSyntaxError(f"expected {kind!r}, found {lx[1]!r}", lx[2])
        i += 1
        return lx

    prefix = word()
    blocks = []
    while i < len(lexemes):
        expect("(")
        base = word()
        expect(")")
        expect("^")
        _, var, vpos = expect("w")
        if not _VAR.match(var):
            raise ExpressionSyntaxError(f"bad variable name {var!r}", vpos)
        blocks.append(Block(base, var, word()))
    return ExponentExpression(prefix, tuple(blocks))


# -- evaluation ----------------------------------------------------------------


def _missing(e: ExponentExpression, nu: Mapping[str, int]) -> None:
    missing = [v for v in e.variables if v not in nu]
    if missing:
        raise KeyError(f"valuation does not cover {missing}")


def evaluate(e: ExponentExpression, nu: Mapping[str, int], group):
    _missing(e, nu)
    acc = group.evaluate_word(e.prefix)
    for b in e.blocks:
        acc = group.multiply(acc, group.full_power(group.evaluate_word(b.base), nu[b.var]))
        acc = group.multiply(acc, group.evaluate_word(b.suffix))
    return acc


def naive_evaluate(e: ExponentExpression, nu: Mapping[str, int], group):
    """Expand the powers into one long word and evaluate it letter by letter."""
    _missing(e, nu)
    letters: List[Token] = list(e.prefix)
    for b in e.blocks:
        letters += list(b.base) * nu[b.var]
        letters += list(b.suffix)
    return group.evaluate_word(letters)


def is_solution(e: ExponentExpression, nu: Mapping[str, int], group) -> bool:
    return group.is_identity(evaluate(e, nu, group))


# -- transformations -----------------------------------------------------------


def invert_token(tok: Token) -> Token:
    if isinstance(tok, tuple):
        return tuple(invert_token(t) if t else "" for t in tok)
    return tok[:-1] if tok.endswith("-") else tok + "-"


def invert_word(w: Sequence[Token]) -> Word:
    return tuple(invert_token(t) for t in reversed(w))


def free_reduce(w: Sequence[Token]) -> Word:
    """Cancel adjacent letter/inverse pairs."""
    out: List[Token] = []
    for t in w:
        if out and out[-1] == invert_token(t):
            out.pop()
        else:
            out.append(t)
    return tuple(out)


def normalize(e: ExponentExpression) -> ExponentExpression:
    """Conjugate each base by the product of the words before it: u'_1^x1 ... u'_k^xk v."""
    conj: Word = free_reduce(e.prefix)
    blocks = []
    for b in e.blocks:
        blocks.append(Block(free_reduce(conj + b.base + invert_word(conj)), b.var, ()))
        conj = free_reduce(conj + b.suffix)
    if blocks:
        blocks[-1] = Block(blocks[-1].base, blocks[-1].var, conj)
        return ExponentExpression((), tuple(blocks))
    return ExponentExpression(conj, ())


def partition_variables(e: ExponentExpression, group) -> Tuple[List[str], List[str]]:
    """(S, M): blocks whose base has zero shift, and the others."""
    S, M = [], []
    for b in e.blocks:
        (M if group.sigma(group.evaluate_word(b.base)) else S).append(b.var)
    return list(dict.fromkeys(S)), list(dict.fromkeys(M))


@dataclass(frozen=True)
class AffineMap:
    """nu -> offset + matrix * nu on valuations; the identity by default."""

    matrix: Optional[Mapping[str, Mapping[str, int]]] = None
    offset: Optional[Mapping[str, int]] = None

    def __call__(self, nu: Mapping[str, int]) -> Valuation:
        if self.matrix is None:
            out = dict(nu)
        else:
            out = {x: sum(c * nu[y] for y, c in row.items()) for x, row in self.matrix.items()}
        for x, c in (self.offset or {}).items():
            out[x] = out.get(x, 0) + c
        return out

    def is_identity(self) -> bool:
        return self.matrix is None and not self.offset


def torsion_free_split(e: ExponentExpression) -> List[Tuple[ExponentExpression, AffineMap]]:
    """Torsion-free pieces of E with their valuation maps.

    A base of nonzero shift has infinite order in the cursor group Z, so E is
    already torsion-free and the split is E itself under the identity map.
    """
    return [(e, AffineMap())]


# -- power groups and the ExpEq / power-knapsack transformations --------------


class PowerGroup:
    """Direct power G^m; letters are m-tuples of G-tokens, "" standing for 1."""

    def __init__(self, group, m: int):
        self.group = group
        self.m = m

    def __repr__(self) -> str:
        return f"PowerGroup({self.group!r}, {self.m})"

    def _check(self, tok: Token) -> Tuple[str, ...]:
        if not isinstance(tok, tuple) or len(tok) != self.m:
            raise ValueError(f"letter {tok!r} is not a {self.m}-tuple")
        return tok

    def identity(self):
        return tuple(self.group.identity() for _ in range(self.m))

    def is_identity(self, g) -> bool:
        return all(self.group.is_identity(x) for x in g)

    def evaluate_word(self, tokens: Iterable[Token]):
        tokens = [self._check(t) for t in tokens]
        return tuple(self.group.evaluate_word([t[j] for t in tokens if t[j]]) for j in range(self.m))

    def multiply(self, a, b):
        return tuple(self.group.multiply(x, y) for x, y in zip(a, b))

    def inverse(self, a):
        return tuple(self.group.inverse(x) for x in a)

    def full_power(self, a, n: int):
        return tuple(self.group.full_power(x, n) for x in a)


def project(e: ExponentExpression, j: int) -> ExponentExpression:
    def pw(w: Word) -> Word:
        return tuple(t[j] for t in w if t[j])

    return ExponentExpression(pw(e.prefix), tuple(Block(pw(b.base), b.var, pw(b.suffix)) for b in e.blocks))


def power_knapsack_to_expeq(e: ExponentExpression, m: int) -> List[ExponentExpression]:
    """Project an expression over G^m onto its m factors."""
    for w in e.words() + [b.base for b in e.blocks]:
        for t in w:
            if not isinstance(t, tuple) or len(t) != m:
                raise ValueError(f"letter {t!r} does not have arity {m}")
    if m == 1:
        return [project(e, 0)]
    return [project(e, j) for j in range(m)]


@dataclass
class PowerKnapsackInstance:
    arity: int
    expression: ExponentExpression
    copies: Dict[str, List[str]]
    group: PowerGroup

    def lift(self, nu: Mapping[str, int]) -> Valuation:
        """Valuation of the knapsack variables induced by an ExpEq solution (dummies set to 0)."""
        out = {v: 0 for v in self.expression.variables}
        for x, cs in self.copies.items():
            for c in cs:
                out[c] = nu[x]
        return out

    def restrict(self, nu: Mapping[str, int]) -> Valuation:
        return {x: nu[cs[0]] for x, cs in self.copies.items()}


def expeq_to_power_knapsack(system: Sequence[ExponentExpression], group) -> PowerKnapsackInstance:
    """A single knapsack expression over G^(m+l) solvable iff the system is."""
    system = list(system)
    if not group.has_infinite_order_element():
        raise ValueError("the group has no element of infinite order")
    a = group.infinite_order_token()
    a_inv = invert_token(a)
    k = max((e.depth for e in system), default=0)
    # pad to equal depth with dummy powers 1^x, then rename every occurrence apart
    padded = []
    copies: Dict[str, List[str]] = {}
    counter = itertools.count()
    occurrences: Dict[str, int] = {}
    for e in system:
        for b in e.blocks:
            occurrences[b.var] = occurrences.get(b.var, 0) + 1
    for j, e in enumerate(system):
        blocks = []
        for i, b in enumerate(e.blocks):
            name = b.var if occurrences[b.var] == 1 else f"{b.var}#{j}.{i}"
            copies.setdefault(b.var, []).append(name)
            blocks.append(Block(b.base, name, b.suffix))
        for i in range(e.depth, k):
            blocks.append(Block((), f"_d#{next(counter)}", ()))
        padded.append(ExponentExpression(e.prefix, tuple(blocks)))
    # variable order: first occurrence in the concatenation
    order: List[str] = [b.var for e in padded for b in e.blocks]
    rank = {v: i for i, v in enumerate(order)}
    sync = []
    for cs in copies.values():
        for x, y in itertools.combinations(sorted(cs, key=rank.__getitem__), 2):
            sync.append(ExponentExpression((), (Block((a,), x), Block((a_inv,), y))))
    exprs = padded + sync
    # every expression now mentions all variables in the common order
    m = len(exprs)
    slots: List[Tuple[List[Token], Dict[str, Tuple[Word, Word]]]] = []
    for e in exprs:
        by_var = {b.var: (b.base, b.suffix) for b in e.blocks}
        slots.append((list(e.prefix), by_var))

    def combine(words: List[Sequence[str]]) -> Word:
        n = max((len(w) for w in words), default=0)
        return tuple(tuple(w[i] if i < len(w) else "" for w in words) for i in range(n))

    prefix = combine([s[0] for s in slots])
    blocks = []
    for v in order:
        base = combine([s[1].get(v, ((), ()))[0] for s in slots])
        suffix = combine([s[1].get(v, ((), ()))[1] for s in slots])
        blocks.append(Block(base, v, suffix))
    return PowerKnapsackInstance(m, ExponentExpression(prefix, tuple(blocks)), copies, PowerGroup(group, m))


# -- brute force ---------------------------------------------------------------


def brute_force_solve(
    e: ExponentExpression, bound: int, group, subset_sum: bool = False
) -> List[Valuation]:
    """All valuations in [0, bound]^V (or {0,1}^V) solving E = 1, by enumeration."""
    names = e.variables
    hi = min(bound, 1) if subset_sum else bound
    pre = group.evaluate_word(e.prefix)
    bases = [group.evaluate_word(b.base) for b in e.blocks]
    sufs = [group.evaluate_word(b.suffix) for b in e.blocks]
    powers: Dict[Tuple[int, int], object] = {}
    out = []
    for vals in itertools.product(range(hi + 1), repeat=len(names)):
        nu = dict(zip(names, vals))
        acc = pre
        for i, b in enumerate(e.blocks):
            key = (i, nu[b.var])
            if key not in powers:
                powers[key] = group.full_power(bases[i], nu[b.var])
            acc = group.multiply(group.multiply(acc, powers[key]), sufs[i])
        if group.is_identity(acc):
            out.append(nu)
    return out


def brute_force_system(
    system: Sequence[ExponentExpression], names: Sequence[str], bound: int, group, subset_sum: bool = False
) -> List[Valuation]:
    hi = min(bound, 1) if subset_sum else bound
    out = []
    for vals in itertools.product(range(hi + 1), repeat=len(names)):
        nu = dict(zip(names, vals))
        if all(is_solution(e, nu, group) for e in system):
            out.append(nu)
    return out


parse = parse_expression
