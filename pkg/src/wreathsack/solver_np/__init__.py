"""NP machinery: Cayley representations, block automata, cycle compressions and certificates."""

from .automata import (
    NFA,
    TOP,
    BlockNfa,
    bounded_decomposition,
    build_block_nfa,
    check_bounded,
    in_bounded_product,
    merge_tuple,
    pad,
    product_nfa,
    remove_epsilon,
    reverse,
    run_trace,
    sample_accepted,
    sccs,
)
from .cayley import (
    CayleyRepresentation,
    CellExpr,
    CellSyntaxError,
    Factor,
    Marked,
    cayley_representation,
    expression_factors,
    one,
    parse_cell,
    split_variables,
)
from .certificate import (
    Certificate,
    MalformedCertificate,
    SearchResult,
    Verdict,
    certificate_from_solution,
    factor_representation,
    search_solve,
    verify_certificate,
)
from .compression import CompressedMatcher, CycleCompression, compressed_member

MarkedExpression = Marked
