"""Sparsifiers for linear codes over prime fields, with reductions for
graph cuts, hypergraph cuts, Cayley-graph spectra, and affine CSPs."""

from .codes import (
    GeneratorMatrix,
    Sparsifier,
    VerificationReport,
    unit_weights,
    verify_sparsifier,
    weight,
    weighted_to_unweighted,
)
from .counting import (
    ContractionTrace,
    CountingBoundReport,
    check_counting_bound,
    code_decomposition,
    contract,
    contract_step,
    densest_subcode_exact,
    subcode_within,
    survival_experiment,
)
from .errors import CodesparseError
from .field import FieldElement, PrimeField, smallest_prime_at_least
from .sparsify import (
    SparsifyParams,
    code_sparsify,
    final_code_sparsify,
    make_unweighted,
    quadratic_sparsify,
    span_decomposition,
    weight_class_decomposition,
)

__all__ = [
    "CodesparseError",
    "ContractionTrace",
    "CountingBoundReport",
    "FieldElement",
    "GeneratorMatrix",
    "PrimeField",
    "Sparsifier",
    "SparsifyParams",
    "VerificationReport",
    "check_counting_bound",
    "code_decomposition",
    "code_sparsify",
    "contract",
    "contract_step",
    "densest_subcode_exact",
    "final_code_sparsify",
    "make_unweighted",
    "quadratic_sparsify",
    "smallest_prime_at_least",
    "span_decomposition",
    "subcode_within",
    "survival_experiment",
    "unit_weights",
    "verify_sparsifier",
    "weight",
    "weight_class_decomposition",
    "weighted_to_unweighted",
]
