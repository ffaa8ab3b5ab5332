"""Exact symbolic verification of transposed Poisson conformal algebras."""

from .algfile import format_algebra, load_algebra, make_algebra, parse_algebra, parse_matrix
from .axioms import (
    CheckReport,
    check_associative,
    check_commutative,
    check_hom_lie,
    check_lie,
    check_nc_tpca,
    check_novikov,
    check_poisson_leibniz,
    check_tpca,
    check_transposed_leibniz,
)
from .conformal import ConformalAlgebra, Endomorphism, LambdaElement, StructureTable, nth, product
from .constructions import (
    BasisChange,
    OrdinaryAlgebra,
    alpha_h,
    change_basis,
    commutator,
    current,
    derivation_product,
    h_bracket,
    tensor,
)
from .identities import check_compatibility_criterion, check_nth_transposed_leibniz, check_derived_identities
from .polyring import ParamField, Poly, parse_poly
from .wab import catalog, make_vir, make_wab, residual_system, solve_reduced

__version__ = "0.1.0"

__all__ = [
    "format_algebra",
    "load_algebra",
    "make_algebra",
    "parse_algebra",
    "parse_matrix",
    "CheckReport",
    "check_associative",
    "check_commutative",
    "check_hom_lie",
    "check_lie",
    "check_nc_tpca",
    "check_novikov",
    "check_poisson_leibniz",
    "check_tpca",
    "check_transposed_leibniz",
    "ConformalAlgebra",
    "Endomorphism",
    "LambdaElement",
    "StructureTable",
    "nth",
    "product",
    "BasisChange",
    "OrdinaryAlgebra",
    "alpha_h",
    "change_basis",
    "commutator",
    "current",
    "derivation_product",
    "h_bracket",
    "tensor",
    "check_compatibility_criterion",
    "check_nth_transposed_leibniz",
    "check_derived_identities",
    "ParamField",
    "Poly",
    "parse_poly",
    "catalog",
    "make_vir",
    "make_wab",
    "residual_system",
    "solve_reduced",
]
