"""Approximate FP8 (E5M2, E4M3) arithmetic as integer operations on bit patterns.

Multiplication, division, reciprocal and square roots are evaluated by
adding and shifting raw patterns as if they were base-2 logarithms. A
conditional carry-in corrects each result to a chosen rounding mode. An
exact rational oracle and an exhaustive verifier check every cell.
"""

from .analysis import (
    CarryTruthTable,
    ErrorMap,
    UlpError,
    VerifyReport,
    derive_carry,
    diff_published,
    error_map,
    ulp_error,
    verify,
    verify_all,
)
from .approx import ApproxResult, ApproxSpec, RangeFlag, approx_apply, carry_in, get_spec, support_matrix
from .carry import BoolExpr
from .errors import (
    DomainError,
    FieldRangeError,
    Fp8Error,
    OutOfRangeError,
    UnsupportedClassError,
    UnsupportedModeError,
)
from .exact import (
    ExactValue,
    OpKind,
    RoundingMode,
    exact_op,
    exact_value,
    faithful_bracket,
    is_faithful,
    round_reference,
)
from .formats import E4M3, E5M2, Fp8Bits, Fp8Format, decode, encode, get_format

__version__ = "0.1.0"

__all__ = [
    "E4M3", "E5M2", "Fp8Bits", "Fp8Format", "decode", "encode", "get_format",
    "ExactValue", "OpKind", "RoundingMode", "exact_op", "exact_value",
    "round_reference", "faithful_bracket", "is_faithful",
    "BoolExpr", "ApproxSpec", "ApproxResult", "RangeFlag", "approx_apply", "carry_in",
    "get_spec", "support_matrix",
    "UlpError", "ErrorMap", "VerifyReport", "CarryTruthTable", "ulp_error", "error_map",
    "verify", "verify_all", "derive_carry", "diff_published",
    "Fp8Error", "FieldRangeError", "UnsupportedClassError", "DomainError",
    "OutOfRangeError", "UnsupportedModeError",
]
