"""Exact computations in abstract Cuntz semigroups."""
from .order import (
    INF,
    ZERO,
    Compact,
    Element,
    ExtValue,
    SemigroupHandle,
    SequenceDescriptor,
    Soft,
    add,
    approximants,
    leq,
    sup,
    way_below,
    wedge,
)
from .catalog import dimension_drop, make_catalog, make_finite_table, make_lsc, make_zstable_model, nbar, softened
from .axioms import AXIOMS, check_all, check_axiom, fragment
from .constructions import (
    cu_product,
    direct_limit,
    gamma_completion,
    grothendieck_interpolation,
    ideal_generated,
    infinity_of,
    quotient,
    seq_product_nbar,
    tau_completion,
    ultraproduct,
)
from .functionals import alpha, detect_elementary, evaluate, functional_space, rank_of, regularize

__version__ = "0.1.0"
