"""Exact computation with graded Hopf algebras and formal group laws."""

from .galgebra import (
    AlgebraPresentation,
    coefficient_algebra,
    parse_presentation,
)
from .fgl import honda, p_series, verify_fgl_axioms
from .hopf import (
    a_star,
    b_star,
    c_star,
    derive_coproduct,
    kk,
    sigma_bar,
    verify_hopf_axioms,
)
from .fiberprod import corepresentability_check, kappa_star, pushout_c_star
from .testalgebras import shipped_algebra, shipped_names
from .acceptance import run_suite

__version__ = "0.1.0"

__all__ = [
    "AlgebraPresentation",
    "coefficient_algebra",
    "parse_presentation",
    "honda",
    "p_series",
    "verify_fgl_axioms",
    "a_star",
    "b_star",
    "c_star",
    "derive_coproduct",
    "kk",
    "sigma_bar",
    "verify_hopf_axioms",
    "corepresentability_check",
    "kappa_star",
    "pushout_c_star",
    "shipped_algebra",
    "shipped_names",
    "run_suite",
    "__version__",
]
