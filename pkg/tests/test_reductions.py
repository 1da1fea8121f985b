import itertools

import pytest

from wreathsack.expr import brute_force_solve, is_solution
from wreathsack.reductions import (
    ThreeDMInstance,
    all_instances,
    brute_force_matching,
    decode_matching,
    reduce_3dm,
    triple_word,
)
from wreathsack.solver_semilinear import is_solvable, solution_set
from wreathsack.wreath import WreathProduct

Z2 = WreathProduct("Z/2")


def test_instance_validation():
    with pytest.raises(ValueError):
        ThreeDMInstance(0, ())
    with pytest.raises(ValueError):
        ThreeDMInstance(1, ((1, 1, 2),))
    with pytest.raises(ValueError):
        ThreeDMInstance(1, ((1, 1, 1), (1, 1, 1)))
    inst = ThreeDMInstance.parse("# q\n2\n1 1 1\n2 2 2\n")
    assert inst == ThreeDMInstance(2, ((1, 1, 1), (2, 2, 2)))
    assert ThreeDMInstance.parse(inst.to_text()) == inst


def test_brute_force_matching_examples():
    assert brute_force_matching(ThreeDMInstance(1, ((1, 1, 1),)))
    assert brute_force_matching(ThreeDMInstance(2, ((1, 1, 1), (2, 2, 2))))
    assert not brute_force_matching(ThreeDMInstance(2, ((1, 1, 1), (1, 2, 2))))
    assert not brute_force_matching(ThreeDMInstance(1, ()))


def test_triple_word_lamps():
    q, l = 2, 1
    g = Z2.evaluate_word(list(triple_word(q, l, (1, 2, 1), ("g1",))))
    assert g.shift == 0
    assert sorted(g.as_dict()) == [1, q + 2, 2 * q + 1, (3 * q + 1) * l]


def test_reduce_examples():
    one = ThreeDMInstance(1, ((1, 1, 1),))
    e = reduce_3dm(one)
    assert e.variables == ["x1", "y1", "y2"]
    assert is_solution(e, {"x1": 1, "y1": 1, "y2": 1}, Z2)
    assert {"x1": 1, "y1": 1, "y2": 1} in brute_force_solve(e, 2, Z2)
    empty = reduce_3dm(ThreeDMInstance(1, ()))
    assert brute_force_solve(empty, 3, Z2) == []
    assert is_solvable(empty, Z2) is None
    shared = ThreeDMInstance(2, ((1, 1, 1), (1, 2, 2)))
    assert brute_force_solve(reduce_3dm(shared), 3, Z2) == []
    assert is_solvable(reduce_3dm(shared), Z2) is None


def test_reduce_rejects_trivial_group():
    with pytest.raises(ValueError):
        reduce_3dm(ThreeDMInstance(1, ()), "1")
    with pytest.raises(ValueError):
        reduce_3dm(ThreeDMInstance(1, ()), "Z/2", g=["g1", "g1"])


def test_reduce_matches_brute_force_small():
    for inst in all_instances(1, 1):
        e = reduce_3dm(inst)
        nu = is_solvable(e, Z2)
        assert (nu is not None) == brute_force_matching(inst)
        if nu is not None:
            assert is_solution(e, nu, Z2)
            M = decode_matching(inst, nu, order=2)
            assert len(M) == inst.q


def test_literal_reduction_under_subset_sum():
    # with 0/1 exponents a cursor jump of (3q+1)*l for l > 1 is out of reach
    inst = ThreeDMInstance(2, ((1, 1, 1), (2, 2, 2)))
    assert brute_force_matching(inst)
    assert solution_set(reduce_3dm(inst), Z2, subset_sum=True).is_empty()
    S = solution_set(reduce_3dm(inst, binary_moves=True), Z2, subset_sum=True)
    assert not S.is_empty()


@pytest.mark.parametrize("spec", ["Z/2", "Z"])
def test_binary_moves_subset_sum_equivalence(spec):
    W = WreathProduct(spec)
    for inst in itertools.islice(all_instances(2, 2), 0, None, 7):
        e = reduce_3dm(inst, binary_moves=True)
        nu = is_solvable(e, W, subset_sum=True)
        assert (nu is not None) == brute_force_matching(inst)
        if nu is not None:
            assert max(nu.values()) <= 1 and is_solution(e, nu, W)
