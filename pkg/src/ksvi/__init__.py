"""Located value indefiniteness toolkit: contexts, propagation proofs, certification, QRNG, beam splitters."""

from .assignment import (
    Assignment,
    PropagationTrace,
    SearchMode,
    Seed,
    build_star_assignment,
    count_completions,
    is_admissible,
    propagate,
    search_completion,
    verify_theorem1,
)
from .constructions import (
    build_corollary1_instance,
    build_theorem1_instance,
    certify_value_indefinite,
    reduce_to_equality,
)
from .geometry import ExactRay, NumRay, canonicalize_ray, cross_product, inner_product, overlap_magnitude
from .hypergraph import Hypergraph, load_hypergraph, save_hypergraph, table1_hypergraph, validate

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "ExactRay",
    "Hypergraph",
    "NumRay",
    "PropagationTrace",
    "SearchMode",
    "Seed",
    "build_corollary1_instance",
    "build_star_assignment",
    "build_theorem1_instance",
    "canonicalize_ray",
    "certify_value_indefinite",
    "count_completions",
    "cross_product",
    "inner_product",
    "is_admissible",
    "load_hypergraph",
    "overlap_magnitude",
    "propagate",
    "reduce_to_equality",
    "save_hypergraph",
    "search_completion",
    "table1_hypergraph",
    "validate",
    "verify_theorem1",
]
