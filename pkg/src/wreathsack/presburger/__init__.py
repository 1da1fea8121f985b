"""Presburger arithmetic over the integers and semilinear sets over N^k."""

from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Div,
    Eq,
    Exists,
    Forall,
    Formula,
    FormulaSyntaxError,
    Le,
    Not,
    Or,
    Term,
    conj,
    disj,
    div,
    eq,
    evaluate,
    exists,
    forall,
    ge,
    is_quantifier_free,
    le,
    lt,
    neg,
    nnf,
    nonneg,
    parse_formula,
    to_text,
)
from .polyhedra import ExtractionLimitError
from .qe import eliminate_quantifiers, simplify
from .semilinear import (
    DimensionError,
    LinearSet,
    SemilinearSet,
    direct_sum,
    dnf,
    formula_to_semilinear,
    permute,
)

__all__ = [name for name in dir() if not name.startswith("_")]
