"""Exact computations with smooth mod-p representations of GL2 over a local field."""
from .errors import (ConfigError, ConstructionError, DomainError, InstabilityError, ModpError, NonUnitError,
                     PrecisionError, RadiusError)
from .localring import CoeffField, LocalRing, LocalScalar, coeff_field, scalar, teichmuller
from .gl2 import GroupElement, cartan_word, iwahori_factor, k_coset, reassemble, vertex_decompose
from .weights import Weight, make_weight, parse_weight
from .cind import CInd, InducedElement, hecke_T, inject, pt_correction
from .quotient import QuotientSpace, kernel_oracle, quotient_make
from .diagram import Diagram, d0_compute, d1_compute, level, make_diagram

__version__ = "0.1.0"

__all__ = [
    "CInd", "CoeffField", "ConfigError", "ConstructionError", "Diagram", "DomainError", "GroupElement",
    "InducedElement", "InstabilityError", "LocalRing", "LocalScalar", "ModpError", "NonUnitError",
    "PrecisionError", "QuotientSpace", "RadiusError", "Weight", "cartan_word", "coeff_field", "d0_compute",
    "d1_compute", "hecke_T", "inject", "iwahori_factor", "k_coset", "kernel_oracle", "level", "make_diagram",
    "make_weight", "parse_weight", "pt_correction", "quotient_make", "reassemble", "scalar", "teichmuller",
    "vertex_decompose",
]
