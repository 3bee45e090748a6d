"""Construction and exact verification of strongest-nonlocal tripartite state sets."""

from .field import CycNum, OMEGA
from .states import (
    CUTS,
    Dims,
    Ket,
    StateSet,
    build_lemma1_set,
    build_product_basis,
    build_set,
    build_theorem1_set,
    build_theorem2_set,
    check_pairwise_orthogonal,
    classify_state,
    inner_product,
)

__version__ = "0.1.0"
