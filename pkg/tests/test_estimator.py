import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from wreathsack.estimator import KnapsackSolver, validate_group, validate_valuations
from wreathsack.expr import brute_force_solve, parse_expression
from wreathsack.wreath import WreathProduct


def test_fit_predict_semilinear():
    est = KnapsackSolver(group="Z/2").fit("(g1 t)^x (t-)^y g1")
    assert est.status_ == "sat" and est.solvable_
    assert est.variables_ == ["x", "y"] and est.n_features_in_ == 2
    V = np.array([[x, y] for x in range(5) for y in range(5)])
    want = np.array([x == 1 and y == 1 for x, y in V])
    assert (est.predict(V) == want).all()
    assert est.score(V, want) == 1.0


def test_predict_matches_enumeration():
    e = parse_expression("(g1 t)^x (g1 t-)^y (g1)^z")
    W = WreathProduct("Z/3")
    est = KnapsackSolver(group="Z/3").fit(e)
    sols = {tuple(nu[v] for v in est.variables_) for nu in brute_force_solve(e, 4, W)}
    grid = np.array(np.meshgrid(range(5), range(5), range(5))).reshape(3, -1).T
    assert {tuple(r) for r, ok in zip(grid, est.predict(grid)) if ok} == sols


def test_search_method():
    est = KnapsackSolver(group="Z", method="search", budget=100).fit("(g1 t)^x (g1- t-)^y")
    assert est.solvable_ and est.certificate_ is not None
    assert est.predict([[est.witness_["x"], est.witness_["y"]]]).all()
    assert KnapsackSolver(method="search").fit("(t)^x t").status_ == "unsat"


def test_subset_sum():
    est = KnapsackSolver(subset_sum=True).fit("(g1)^x (g1)^y")
    assert est.predict([[0, 0], [1, 1], [1, 0]]).tolist() == [True, True, False]
    with pytest.raises(ValueError):
        est.predict([[2, 0]])


def test_get_params_and_clone():
    est = KnapsackSolver(group="Z x Z/2", budget=50)
    assert est.get_params() == {"group": "Z x Z/2", "method": "semilinear", "subset_sum": False, "budget": 50}
    c = clone(est.set_params(method="search"))
    assert c.get_params()["method"] == "search" and not hasattr(c, "status_")


def test_validation():
    with pytest.raises(NotFittedError):
        KnapsackSolver().predict([[0]])
    with pytest.raises(ValueError):
        KnapsackSolver(method="magic").fit("(g1)^x")
    with pytest.raises(ValueError):
        KnapsackSolver(budget=0).fit("(g1)^x")
    with pytest.raises(ValueError):
        KnapsackSolver(method="search", subset_sum=True).fit("(g1)^x")
    with pytest.raises(ValueError):
        KnapsackSolver(group="Z").fit("(g2)^x")
    with pytest.raises(TypeError):
        KnapsackSolver().fit(3)
    with pytest.raises(TypeError):
        validate_group(2)
    est = KnapsackSolver().fit("(g1)^x")
    with pytest.raises(ValueError):
        est.predict([[0, 1]])
    with pytest.raises(ValueError):
        est.predict([[-1]])
    with pytest.raises(ValueError):
        validate_valuations([[np.nan]], 1)
    assert validate_valuations(np.zeros((0, 2)), 2).shape == (0, 2)
