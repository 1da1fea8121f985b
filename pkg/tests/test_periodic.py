import math
import random

import pytest

from wreathsack.abelian import AbelianGroupSpec
from wreathsack.periodic import (
    PeriodicProduct,
    PeriodicWord,
    membership,
    naive_membership,
    parse_cutoff,
    parse_periodic,
    value_at,
    word_problem,
)

Z = AbelianGroupSpec.parse("Z")


def ints(p, v):
    return v.to_list()[0]


def test_value_at_examples():
    p = PeriodicProduct.from_ints("Z", [[1, -1]])
    assert ints(p, value_at(p, 7)) == -1
    q = PeriodicProduct.from_ints("Z", [[1], [-1, 0]])
    assert ints(q, value_at(q, 1)) == 1
    empty = PeriodicProduct("Z")
    assert Z.is_identity(value_at(empty, 10**30))
    assert ints(p, value_at(p, 2**200 + 1)) == -1


def test_word_problem_examples():
    assert word_problem(PeriodicProduct.from_ints("Z", [[1, -1], [-1, 1]]))
    assert not word_problem(PeriodicProduct.from_ints("Z", [[1], [-1, 0]]))
    p = PeriodicProduct.from_ints("Z/2", [[1, 1], [1], [1, 1, 1, 1]])
    truth = all(AbelianGroupSpec.parse("Z/2").is_identity(value_at(p, k)) for k in range(2 * p.lcm()))
    assert word_problem(p) == truth


def test_membership_examples():
    u = PeriodicProduct.from_ints("Z", [[0, 0, 1]])
    assert membership(u, 2)
    assert not membership(u, 5)
    assert membership(PeriodicProduct.from_ints("Z", [[1, -1], [-1, 1]]), 2**100)
    assert membership(u, 0)
    with pytest.raises(ValueError):
        membership(u, -1)


def random_product(rng):
    spec = rng.choice(["Z", "Z/2", "Z/3"])
    G = AbelianGroupSpec.parse(spec)
    words = []
    for _ in range(rng.randint(1, 4)):
        q = rng.randint(1, 5)
        if spec == "Z":
            words.append(PeriodicWord(tuple(G.from_vector([rng.randint(-3, 3)]) for _ in range(q))))
        else:
            words.append(PeriodicWord(tuple(G.from_vector([rng.randint(0, 2)]) for _ in range(q))))
    # often force cancellation by appending a negated copy
    if rng.random() < 0.5:
        w = words[0]
        words.append(PeriodicWord(tuple(G.negate(v) for v in w.values)))
    return PeriodicProduct(G, words)


def test_membership_matches_naive():
    rng = random.Random(3)
    for _ in range(400):
        p = random_product(rng)
        for m in range(2 * p.lcm() + 1):
            assert membership(p, m) == naive_membership(p, m)
        assert word_problem(p) == membership(p, p.lcm())
        if word_problem(p):
            assert membership(p, p.total_period() + rng.randint(0, 10**9))


def test_window_claim():
    rng = random.Random(5)
    windows = 0
    for _ in range(400):
        p = random_product(rng)
        s = p.total_period()
        zeros = [p.spec.is_identity(value_at(p, k)) for k in range(3 * p.lcm() + s)]
        for m in range(s, len(zeros)):
            if all(zeros[m - s : m]):
                windows += 1
                assert zeros[m]
    assert windows > 0


def test_parse():
    p = parse_periodic("Z", "[(g1),(g1-, 1)]")
    assert [w.period for w in p.words] == [1, 2]
    assert not word_problem(p)
    for bad in ["(g1)", "[(g1) (g1)]", "[()]", "[(g1]"]:
        with pytest.raises(ValueError):
            parse_periodic("Z", bad)
    assert parse_cutoff("0x10") == 16 and parse_cutoff("12") == 12
    with pytest.raises(ValueError):
        parse_cutoff("1e5")
    assert math.lcm(2, 3) == PeriodicProduct.from_ints("Z", [[1, 2], [1, 2, 3]]).lcm()
