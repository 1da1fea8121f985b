import itertools
import math

import pytest
from hypothesis import given, strategies as st

from wreathsack.abelian import INFINITY, AbelianGroupSpec, GroupSpecError, TokenError, linearize, solve_expeq
from wreathsack.expr import parse_expression

ZZ2 = AbelianGroupSpec.parse("Z x Z/2")
Z2Z3 = AbelianGroupSpec.parse("Z/2 x Z/3")


def test_parse_and_print():
    assert AbelianGroupSpec.parse("Z^2 x Z/3") == AbelianGroupSpec(2, (3,))
    assert AbelianGroupSpec.parse("ℤ ⊕ ℤ/2") == ZZ2
    assert AbelianGroupSpec.parse("1").ngens == 0
    assert str(AbelianGroupSpec(2, (3,))) == "Z^2 x Z/3"
    with pytest.raises(GroupSpecError):
        AbelianGroupSpec.parse("Q")
    with pytest.raises(GroupSpecError):
        AbelianGroupSpec(1, (1,))


def test_add_examples():
    a, b = ZZ2.element([1], [1]), ZZ2.element([2], [1])
    assert ZZ2.add(a, b) == ZZ2.element([3], [0])
    assert ZZ2.is_identity(ZZ2.add(a, ZZ2.negate(a)))
    assert ZZ2.is_identity(ZZ2.identity())


def test_order_examples():
    assert ZZ2.order(ZZ2.identity()) == 1
    assert Z2Z3.order(Z2Z3.element([], [1, 1])) == 6
    Z = AbelianGroupSpec.parse("Z")
    assert Z.order(Z.element([5])) == INFINITY


def test_order_by_iteration():
    G = AbelianGroupSpec.parse("Z/4 x Z/6 x Z/5")
    for t in itertools.product(range(4), range(6), range(5)):
        a = G.element([], t)
        acc, n = a, 1
        while not G.is_identity(acc):
            acc, n = G.add(acc, a), n + 1
        assert G.order(a) == n


def test_evaluate_word_examples():
    Z = AbelianGroupSpec.parse("Z")
    assert Z.is_identity(Z.evaluate_word(""))
    assert Z.evaluate_word("g1 g1 g1-") == Z.element([1])
    assert ZZ2.evaluate_word("g1 g2 g1") == ZZ2.element([2], [1])
    with pytest.raises(TokenError):
        Z.evaluate_word("g2")
    with pytest.raises(TokenError):
        Z.evaluate_word("t")


elements = st.tuples(st.integers(-20, 20), st.integers(0, 5)).map(lambda p: AbelianGroupSpec(1, (6,)).element([p[0]], [p[1]]))


@given(elements, elements, elements)
def test_group_axioms(a, b, c):
    G = AbelianGroupSpec(1, (6,))
    assert G.add(G.add(a, b), c) == G.add(a, G.add(b, c))
    assert G.add(a, b) == G.add(b, a)
    assert G.add(a, G.identity()) == a
    assert G.is_identity(G.add(a, G.negate(a)))


@given(st.integers(0, 11), st.integers(0, 9))
def test_order_is_minimal(x, y):
    G = AbelianGroupSpec(0, (12, 10))
    a = G.element([], [x, y])
    n = G.order(a)
    assert n <= 60 and G.is_identity(G.scale(a, n))
    assert all(not G.is_identity(G.scale(a, k)) for k in range(1, n))


def test_solve_expeq_examples():
    Z = AbelianGroupSpec.parse("Z")
    S = solve_expeq(Z, [parse_expression("(g1 g1)^x (g1 g1 g1)^y g1- g1- g1- g1- g1- g1- g1- g1- g1- g1- g1- g1-")])
    assert S.points(12) == [(0, 4), (3, 2), (6, 0)]
    Z2 = AbelianGroupSpec.parse("Z/2")
    assert solve_expeq(Z2, [parse_expression("(g1)^x")]).points(8) == [(v,) for v in range(0, 9, 2)]
    everything = solve_expeq(Z, [], variables=["x", "y"])
    assert len(everything.points(3)) == 16


def test_solve_expeq_matches_enumeration():
    G = AbelianGroupSpec.parse("Z x Z/3")
    system = [parse_expression("(g1 g2)^x (g1-)^y g2"), parse_expression("(g2 g2)^x (g2)^z")]
    S = solve_expeq(G, system)
    names = ["x", "y", "z"]
    for v in itertools.product(range(6), repeat=3):
        nu = dict(zip(names, v))
        ok = all(
            G.is_identity(
                G.evaluate_word([t for w, x in e.factors() for t in list(w) * (nu[x] if x else 1)])
            )
            for e in system
        )
        assert S.member(v) == ok


def test_linearize_shapes():
    free, tors = linearize(ZZ2, parse_expression("(g1 g2)^x g1-"))
    assert len(free) == 1 and len(tors) == 1 and tors[0][0] == 2
    assert free[0].evaluate({"x": 1}) == 0
