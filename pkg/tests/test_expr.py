import random

import pytest

from generators import TOKENS, exponent_expression, normalized_expression
from wreathsack.abelian import AbelianGroupSpec
from wreathsack.expr import (
    AffineMap,
    Block,
    ExponentExpression,
    ExpressionSyntaxError,
    PowerGroup,
    brute_force_solve,
    brute_force_system,
    evaluate,
    expeq_to_power_knapsack,
    free_reduce,
    invert_word,
    is_solution,
    naive_evaluate,
    normalize,
    parse_expression,
    partition_variables,
    power_knapsack_to_expeq,
    print_expression,
    torsion_free_split,
)
from wreathsack.wreath import WreathProduct

Z2 = WreathProduct("Z/2")
Z = AbelianGroupSpec.parse("Z")


def test_parse_examples():
    e = parse_expression("(g1 t)^x t-")
    assert e.depth == 1 and e.blocks[0] == Block(("g1", "t"), "x", ("t-",))
    empty = parse_expression("")
    assert empty.depth == 0 and empty.prefix == ()
    rep = parse_expression("(t)^x (t-)^x")
    assert rep.depth == 2 and rep.repeated_variables() == ["x"] and not rep.is_knapsack()


@pytest.mark.parametrize("text", ["(g1", "(g1)^", "(g1) x", "g1 ) t", "(g1)^1x"])
def test_parse_errors(text):
    with pytest.raises(ExpressionSyntaxError):
        parse_expression(text)


def test_print_parse_round_trip():
    rng = random.Random(5)
    for _ in range(200):
        e = exponent_expression(rng)
        assert parse_expression(print_expression(e)) == e
    tup = ExponentExpression(((("g1", ""),)), (Block((("", "g1-"),), "x"),))
    assert parse_expression(str(tup)) == tup


def test_evaluate_examples():
    assert is_solution(parse_expression("(g1 t)^x t- g1"), {"x": 1}, Z2)
    v0 = parse_expression("g1 t g1")
    assert evaluate(v0, {}, Z2) == Z2.evaluate_word("g1 t g1")
    with pytest.raises(KeyError):
        evaluate(parse_expression("(t)^x"), {}, Z2)


def test_evaluate_matches_naive():
    rng = random.Random(9)
    for spec in ("Z/2", "Z"):
        W = WreathProduct(spec)
        for _ in range(150):
            e = exponent_expression(rng)
            nu = {x: rng.randint(0, 10) for x in e.variables}
            assert evaluate(e, nu, W) == naive_evaluate(e, nu, W)


def test_normalize_example():
    n = normalize(parse_expression("t (g1)^x t-"))
    assert n == ExponentExpression((), (Block(("t", "g1", "t-"), "x", ()),))
    e = parse_expression("t (g1)^x t-")
    for v in range(4):
        assert evaluate(e, {"x": v}, Z2) == evaluate(n, {"x": v}, Z2)
    assert normalize(parse_expression("g1 t")) == parse_expression("g1 t")


def test_normalize_preserves_value():
    rng = random.Random(13)
    for _ in range(200):
        e = exponent_expression(rng)
        n = normalize(e)
        assert n.is_normalized()
        nu = {x: rng.randint(0, 6) for x in e.variables}
        assert evaluate(e, nu, Z2) == evaluate(n, nu, Z2)
    already = normalized_expression(random.Random(1))
    assert evaluate(normalize(already), {x: 2 for x in already.variables}, Z2) == evaluate(
        already, {x: 2 for x in already.variables}, Z2
    )


def test_free_reduce():
    assert free_reduce(("g1", "t", "t-", "g1-", "t")) == ("t",)
    assert invert_word(("g1", "t")) == ("t-", "g1-")


def test_partition_variables_examples():
    assert partition_variables(parse_expression("(g1)^x (t)^y"), Z2) == (["x"], ["y"])
    assert partition_variables(parse_expression("(g1 t t-)^x"), Z2) == (["x"], [])
    assert partition_variables(parse_expression("(g1 t)^x"), Z2) == ([], ["x"])


def test_torsion_free_split():
    e = parse_expression("(g1 t)^x (t-)^y")
    [(f, phi)] = torsion_free_split(e)
    assert f == e and phi.is_identity()
    assert AffineMap()({"x": 3}) == {"x": 3}
    shifted = AffineMap({"x": {"x": 2}}, {"x": 1})
    assert shifted({"x": 3}) == {"x": 7}


def test_power_knapsack_to_expeq_examples():
    e = parse_expression("([g1])^x [g1-]")
    assert power_knapsack_to_expeq(e, 1) == [parse_expression("(g1)^x g1-")]
    e2 = ExponentExpression((), (Block((("g1", ""),), "x"), Block((("", "g1"),), "y", (("g1-", "g1-"),))))
    system = power_knapsack_to_expeq(e2, 2)
    assert len(system) == 2
    sols = brute_force_system(system, ["x", "y"], 5, Z)
    assert sols == [{"x": 1, "y": 1}]
    assert [nu for nu in brute_force_solve(e2, 5, PowerGroup(Z, 2))] == sols
    with pytest.raises(ValueError):
        power_knapsack_to_expeq(e2, 3)


def _both_sides(system, names, bound=5):
    inst = expeq_to_power_knapsack(system, Z)
    left = brute_force_system(system, names, bound, Z)
    right = brute_force_solve(inst.expression, bound, inst.group)
    return inst, left, right


def test_expeq_to_power_knapsack_single():
    e = parse_expression("(g1)^x (g1-)^y g1")
    inst = expeq_to_power_knapsack([e], Z)
    assert inst.arity == 1 and power_knapsack_to_expeq(inst.expression, 1) == [e]


def test_expeq_to_power_knapsack_repeated():
    system = [parse_expression("(g1)^x g1- g1-")] * 2
    inst, left, right = _both_sides(system, ["x"])
    assert left == [{"x": 2}]
    assert right and {inst.restrict(nu)["x"] for nu in right} == {2}
    assert is_solution(inst.expression, inst.lift({"x": 2}), inst.group)


def test_expeq_to_power_knapsack_two_unknowns():
    system = [parse_expression("(g1)^x (g1)^y g1- g1- g1-"), parse_expression("(g1)^x (g1-)^y g1-")]
    inst, left, right = _both_sides(system, ["x", "y"])
    assert left == [{"x": 2, "y": 1}]
    assert {tuple(sorted(inst.restrict(nu).items())) for nu in right} == {(("x", 2), ("y", 1))}
    assert is_solution(inst.expression, inst.lift({"x": 2, "y": 1}), inst.group)


def test_expeq_to_power_knapsack_random_agreement():
    rng = random.Random(17)
    for _ in range(40):
        system = []
        for _ in range(rng.randint(1, 2)):
            k = rng.randint(1, 2)
            blocks = tuple(Block((rng.choice(("g1", "g1-")),) * rng.randint(1, 2), rng.choice("xy")) for _ in range(k))
            system.append(ExponentExpression(("g1",) * rng.randint(0, 3), blocks))
        names = sorted({b.var for e in system for b in e.blocks})
        inst, left, right = _both_sides(system, names, 4)
        assert bool(left) == bool(right)
        for nu in right:
            assert all(is_solution(e, inst.restrict(nu), Z) for e in system)


def test_expeq_needs_infinite_order():
    with pytest.raises(ValueError):
        expeq_to_power_knapsack([parse_expression("(g1)^x")], AbelianGroupSpec.parse("Z/2"))


def test_brute_force_examples():
    assert [nu["x"] for nu in brute_force_solve(parse_expression("(g1)^x"), 5, Z2)] == [0, 2, 4]
    assert brute_force_solve(parse_expression("(t)^x t"), 7, Z2) == []
    assert [nu["x"] for nu in brute_force_solve(parse_expression("(g1)^x"), 5, Z2, subset_sum=True)] == [0]
