"""Random instances shared by the test modules."""

from __future__ import annotations

import random
from typing import List, Tuple

from wreathsack.expr import Block, ExponentExpression
from wreathsack.presburger import Term, conj, disj, div, eq, exists, forall, le, neg
from wreathsack.presburger.formula import Formula, implies

TOKENS = ("g1", "g1-", "t", "t-")
NAMES = ("x", "y", "z")


def word(rng: random.Random, n: int, tokens=TOKENS) -> Tuple[str, ...]:
    return tuple(rng.choice(tokens) for _ in range(n))


def normalized_expression(rng: random.Random, max_depth: int = 3, max_u: int = 4, max_v: int = 4) -> ExponentExpression:
    """u1^x1 ... uk^xk v with distinct variables."""
    k = rng.randint(0, max_depth)
    if k == 0:
        return ExponentExpression(word(rng, rng.randint(0, max_v)), ())
    names = rng.sample(NAMES, k)
    blocks = [Block(word(rng, rng.randint(1, max_u)), names[i], ()) for i in range(k)]
    last = blocks[-1]
    blocks[-1] = Block(last.base, last.var, word(rng, rng.randint(0, max_v)))
    return ExponentExpression((), tuple(blocks))


def exponent_expression(rng: random.Random, max_depth: int = 3) -> ExponentExpression:
    """Arbitrary prefix and suffixes; variables may repeat."""
    k = rng.randint(0, max_depth)
    blocks = tuple(
        Block(word(rng, rng.randint(1, 3)), rng.choice(NAMES[:2]), word(rng, rng.randint(0, 2))) for _ in range(k)
    )
    return ExponentExpression(word(rng, rng.randint(0, 2)), blocks)


def corpus(seed: int = 2024, size: int = 500) -> List[Tuple[ExponentExpression, str]]:
    """The shared randomized corpus: (expression, lamp group) pairs over Z/2 and Z."""
    rng = random.Random(seed)
    return [(normalized_expression(rng), "Z/2" if i % 2 == 0 else "Z") for i in range(size)]


# -- Presburger formulas --------------------------------------------------------


def term(rng: random.Random, names, max_coeff: int = 4) -> Term:
    t = Term.constant(rng.randint(-6, 6))
    for v in names:
        if rng.random() < 0.7:
            t = t + Term.var(v, rng.randint(-max_coeff, max_coeff))
    return t


def atom(rng: random.Random, names) -> Formula:
    t = term(rng, names)
    r = rng.random()
    if r < 0.45:
        return le(t)
    if r < 0.65:
        return eq(t)
    return div(rng.randint(2, 4), t)


def qf_formula(rng: random.Random, names, depth: int = 2) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        return atom(rng, names)
    parts = [qf_formula(rng, names, depth - 1) for _ in range(rng.randint(2, 3))]
    r = rng.random()
    if r < 0.45:
        return conj(*parts)
    if r < 0.9:
        return disj(*parts)
    return neg(parts[0])


def box(x: str, bound: int) -> Formula:
    return conj(le(Term.var(x, -1) - bound), le(Term.var(x) - bound))


def guarded_formula(rng: random.Random, free, n_quant: int, bound: int) -> Formula:
    """Random formula whose quantified variables stay inside [-bound, bound].

    Bounded enumeration with witness bound ``bound`` is then an exact oracle.
    The innermost variable sometimes gets the upper bound ``v + c`` for a free
    variable v, which keeps the general elimination path in play; free values
    must then stay in [-bound + 1, bound - 1].
    """
    bound_vars = [f"q{i}" for i in range(n_quant)]
    f = qf_formula(rng, list(free) + bound_vars)
    for i, x in enumerate(reversed(bound_vars)):
        guard = box(x, bound)
        if i == 0 and free and rng.random() < 0.5:
            top = Term.var(rng.choice(list(free))) + rng.randint(0, 1)
            guard = conj(le(Term.var(x, -1) - bound), le(Term.var(x) - top))
        if rng.random() < 0.6:
            f = exists(x, conj(guard, f))
        else:
            f = forall(x, implies(guard, f))
        if rng.random() < 0.3:
            f = conj(f, atom(rng, free)) if rng.random() < 0.5 else disj(f, atom(rng, free))
    return f
