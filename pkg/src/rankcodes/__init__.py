"""Rank-metric codes from sigma-linearized polynomials over finite fields."""

from __future__ import annotations

from .errors import CapacityError, FieldMismatchError, GuardError, ParameterError, RankCodesError
from .field import FieldElement, FiniteField, build_field, parse_field_spec
from .linpoly import LinearizedPoly, MatrixRep, puncture_matrix
from .codes import (
    ExplicitCode,
    Family,
    RankCode,
    c_sigma_t,
    gabidulin,
    membership,
    oo_additive,
    oo_nonlinear,
    parse_code_spec,
    read_codewords,
    trombetti_zhou,
    twisted_gabidulin,
    write_codewords,
)
from .analysis import (
    EquivalenceMap,
    MatrixCode,
    adjoint_code,
    apply_equivalence,
    closure_flags,
    code_report,
    compose_equivalences,
    gabidulin_subspace_census,
    inequivalence_report,
    is_mrd,
    left_idealiser,
    min_distance,
    puncture_code,
    right_idealiser,
    singleton_bound,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "FieldMismatchError", "GuardError", "ParameterError", "RankCodesError",
    "FieldElement", "FiniteField", "build_field", "parse_field_spec",
    "LinearizedPoly", "MatrixRep", "puncture_matrix",
    "ExplicitCode", "Family", "RankCode", "c_sigma_t", "gabidulin", "membership", "oo_additive",
    "oo_nonlinear", "parse_code_spec", "read_codewords", "trombetti_zhou", "twisted_gabidulin",
    "write_codewords",
    "EquivalenceMap", "MatrixCode", "adjoint_code", "apply_equivalence", "closure_flags",
    "code_report", "compose_equivalences", "gabidulin_subspace_census", "inequivalence_report",
    "is_mrd", "left_idealiser", "min_distance", "puncture_code", "right_idealiser",
    "singleton_bound",
]
