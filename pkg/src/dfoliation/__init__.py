"""Singular foliations by polynomial vector fields and their D-modules."""

from .scalars import GaussianRational
from .poly import GREVLEX, LEX, MonomialOrder, Poly, elimination_order, parse_poly
from .groebner import (
    ReducedGB,
    groebner_basis,
    ideal_membership,
    is_unit_ideal,
    krull_dimension,
    normal_form,
    syzygies,
)
from .weyl import WeylOp, parse_operator, principal_symbol, weyl_commutator
from .foliation import (
    FoliationPresentation,
    VectorField,
    check_lie_subalgebra,
    hamiltonian_foliation,
    rank_profile,
    strata,
)
from .dmod import (
    characteristic_variety,
    check_hypotheses,
    d_irregularity,
    first_integrals,
    truncated_endo_cohomology,
)

__all__ = [
    "GaussianRational", "GREVLEX", "LEX", "MonomialOrder", "Poly", "elimination_order", "parse_poly",
    "ReducedGB", "groebner_basis", "ideal_membership", "is_unit_ideal", "krull_dimension",
    "normal_form", "syzygies", "WeylOp", "parse_operator", "principal_symbol", "weyl_commutator",
    "FoliationPresentation", "VectorField", "check_lie_subalgebra", "hamiltonian_foliation",
    "rank_profile", "strata", "characteristic_variety", "check_hypotheses", "d_irregularity",
    "first_integrals", "truncated_endo_cohomology",
]
__version__ = "0.1.0"
