"""Exact toolkit for quantum loop group representations.

Type-A1 fixed-point representations with relation checks, and q-characters
of Kirillov-Reshetikhin and prefundamental modules from graded quiver
Grassmannians over generalized preprojective algebras.
"""

from .cartan import CartanData, GradedDimVector, build_triple_quiver, preset, validate_cartan, weight_shift
from .charlab import (
    QCharacter,
    YMonomial,
    a_monomial,
    hj_limit_compare,
    is_dominant,
    is_right_negative,
    kr_qcharacter,
    lweight_match,
    monomial_of,
    prefundamental_qcharacter,
    prefundamental_weight,
    specialness_certificate,
)
from .fockrep import FramingData, FixedPointRep, central_element, check_relations
from .grassmann import count_points_fp, euler_char, graded_support
from .preproj import GradedModule, build_cyclic_quotient, build_injective_trunc, build_kr_module, dualize_shift, verify_module
from .scalars import LaurentPoly, LSeries, RatFunc, expand, g_func, quantum_int

__version__ = "0.1.0"

__all__ = [
    "CartanData", "GradedDimVector", "build_triple_quiver", "preset", "validate_cartan", "weight_shift",
    "QCharacter", "YMonomial", "a_monomial", "hj_limit_compare", "is_dominant", "is_right_negative",
    "kr_qcharacter", "lweight_match", "monomial_of", "prefundamental_qcharacter", "prefundamental_weight",
    "specialness_certificate", "FramingData", "FixedPointRep", "central_element", "check_relations",
    "count_points_fp", "euler_char", "graded_support", "GradedModule", "build_cyclic_quotient",
    "build_injective_trunc", "build_kr_module", "dualize_shift", "verify_module", "LaurentPoly", "LSeries",
    "RatFunc", "expand", "g_func", "quantum_int",
]
