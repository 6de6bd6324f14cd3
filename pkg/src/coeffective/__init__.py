"""Exact computation of extended coeffective complexes and their cohomology."""

from .builder import (
    DoubleComplex,
    ExtendedComplex,
    StructureData,
    StructureError,
    build_extended_complex,
    extend,
    symbol_complex,
    validate_structure,
)
from .exterior import Form, wedge
from .homology import CochainComplex, cohomology, les_from_double, les_predict
from .models import builtin, local_exactness, parse_model, parse_structure
from .structures import Calibration, column_profile, standard_g2, standard_symplectic

__version__ = "0.1.0"

__all__ = [
    "Calibration", "CochainComplex", "DoubleComplex", "ExtendedComplex", "Form",
    "StructureData", "StructureError", "build_extended_complex", "builtin",
    "cohomology", "column_profile", "extend", "les_from_double", "les_predict",
    "local_exactness", "parse_model", "parse_structure", "standard_g2",
    "standard_symplectic", "symbol_complex", "validate_structure", "wedge",
]
