"""Estimator-style wrapper: fit on an expression, predict whether valuations solve it."""

from __future__ import annotations

from typing import Optional, Union

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .abelian import AbelianGroupSpec
from .expr import ExponentExpression, is_solution, parse_expression
from .solver_np import search_solve
from .solver_semilinear import solution_set
from .wreath import WreathProduct

METHODS = ("semilinear", "search")


def validate_group(group: Union[str, AbelianGroupSpec, WreathProduct]) -> WreathProduct:
    if isinstance(group, WreathProduct):
        return group
    if isinstance(group, (str, AbelianGroupSpec)):
        return WreathProduct(group)
    raise TypeError(f"group must be a spec string, AbelianGroupSpec or WreathProduct, not {type(group).__name__}")


def validate_expression(e: Union[str, ExponentExpression], group: WreathProduct) -> ExponentExpression:
    if isinstance(e, str):
        e = parse_expression(e)
    if not isinstance(e, ExponentExpression):
        raise TypeError(f"expected an expression or its text, not {type(e).__name__}")
    for w in e.words() + [b.base for b in e.blocks]:
        group.evaluate_word(list(w))  # raises on tokens outside the group
    return e


def validate_valuations(V, n_variables: int, subset_sum: bool = False) -> np.ndarray:
    """2-d array of naturals with one column per variable."""
    V = check_array(V, dtype=np.int64, ensure_2d=True, ensure_min_samples=0, ensure_min_features=0)
    if V.shape[1] != n_variables:
        raise ValueError(f"expected {n_variables} columns, got {V.shape[1]}")
    if (V < 0).any():
        raise ValueError("valuations must be natural numbers")
    if subset_sum and (V > 1).any():
        raise ValueError("subset-sum valuations must be 0 or 1")
    return V


class KnapsackSolver(BaseEstimator):
    """Solve one knapsack/exponent expression over G wr Z.

    ``fit(expression)`` decides solvability; with ``method="semilinear"`` it also
    keeps the full solution set, and ``predict`` tests rows of a valuation
    matrix (columns in ``variables_`` order).
    """

    def __init__(self, group: str = "Z/2", method: str = "semilinear", subset_sum: bool = False, budget: int = 1000):
        self.group = group
        self.method = method
        self.subset_sum = subset_sum
        self.budget = budget

    def _validate_params(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.method == "search" and self.subset_sum:
            raise ValueError("the search method does not support subset_sum")
        if not isinstance(self.budget, int) or self.budget < 1:
            raise ValueError("budget must be a positive int")

    def fit(self, X, y=None) -> "KnapsackSolver":
        self._validate_params()
        self.group_ = validate_group(self.group)
        self.expression_ = validate_expression(X, self.group_)
        self.variables_ = list(self.expression_.variables)
        self.n_features_in_ = len(self.variables_)
        self.solution_set_ = None
        self.certificate_ = None
        if self.method == "semilinear":
            self.solution_set_ = solution_set(self.expression_, self.group_, self.subset_sum)
            point = self.solution_set_.sample_point()
            self.witness_ = None if point is None else dict(zip(self.variables_, map(int, point)))
            self.status_ = "sat" if self.witness_ is not None else "unsat"
        else:
            r = search_solve(self.expression_, self.group_, self.budget)
            self.status_, self.witness_, self.certificate_ = r.status, r.valuation, r.certificate
        return self

    @property
    def solvable_(self) -> Optional[bool]:
        check_is_fitted(self, "status_")
        return {"sat": True, "unsat": False}.get(self.status_)

    def predict(self, V) -> np.ndarray:
        """Boolean vector: does row i (a valuation) solve the expression?"""
        check_is_fitted(self, "expression_")
        V = validate_valuations(V, self.n_features_in_, self.subset_sum)
        if self.solution_set_ is not None:
            return np.array([self.solution_set_.member([int(x) for x in row]) for row in V], dtype=bool)
        return np.array(
            [is_solution(self.expression_, dict(zip(self.variables_, map(int, row))), self.group_) for row in V],
            dtype=bool,
        )

    def score(self, V, y) -> float:
        y = np.asarray(y, dtype=bool)
        return float((self.predict(V) == y).mean()) if len(y) else 1.0
