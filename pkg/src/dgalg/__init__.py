"""Exact-arithmetic homological algebra for finite graded setups."""

__version__ = "0.1.0"

from .fields import FieldSpec, field_from_name
from .graded import GradedVectorSpace, Vec, GradedMap, koszul_sign
from .multilinear import (Cochain, CochainFamily, infinitesimal_compose,
                          brace, fill_brace, mult_brace,
                          generic_differential, BudgetExceeded)

__all__ = [
    "FieldSpec", "field_from_name",
    "GradedVectorSpace", "Vec", "GradedMap", "koszul_sign",
    "Cochain", "CochainFamily", "infinitesimal_compose", "brace",
    "fill_brace", "mult_brace", "generic_differential", "BudgetExceeded",
    "__version__",
]
