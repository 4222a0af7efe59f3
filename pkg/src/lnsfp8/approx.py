"""Approximate FP8 operations evaluated as integer arithmetic on bit patterns.

A normal FP8 pattern minus the bias pattern ``B`` is a fixed-point
approximation of ``log2|x|``, so multiplication becomes addition,
division subtraction and square roots a one-bit shift. A conditional
carry into the least significant position corrects the result for a
chosen rounding mode.

All expressions act on the 7-bit magnitude (exponent and mantissa
fields); the sign bit is computed separately.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .carry import BoolExpr, CellKind, TableCell, published_row
from .errors import DomainError, UnsupportedModeError
from .exact import OpKind, RoundingMode, _require_normal
from .formats import Fp8Bits, Fp8Format, get_format

__all__ = [
    "RangeFlag",
    "ApproxSpec",
    "ApproxResult",
    "SupportCell",
    "to_lns",
    "from_lns",
    "get_spec",
    "carry_in",
    "raw_magnitude",
    "result_sign",
    "approx_apply",
    "uncorrected_spec",
    "support_matrix",
]


_NO_CARRY = TableCell(CellKind.ZERO)


class RangeFlag(enum.Enum):
    IN_RANGE = "ok"
    OVERFLOW = "overflow"
    UNDERFLOW = "underflow"


def _signed8(k: int) -> int:
    return k - 0x100 if k & 0x80 else k


def _range_flag(value: int, fmt: Fp8Format) -> RangeFlag:
    if value < fmt.min_magnitude:
        return RangeFlag.UNDERFLOW
    if value > fmt.max_magnitude:
        return RangeFlag.OVERFLOW
    return RangeFlag.IN_RANGE


def to_lns(bits: Fp8Bits) -> int:
    """Sign-magnitude fixed-point ``log2|x|`` approximation, as an 8-bit pattern.

    The magnitude is ``X[6:0] - B`` modulo 2**7 with ``mantissa_bits``
    fractional bits; the sign bit is passed through.
    """
    _require_normal(bits)
    return (bits.sign << 7) | ((bits.magnitude - bits.format.lns_bias) & 0x7F)


def from_lns(pattern: int, fmt: Fp8Format) -> tuple[Fp8Bits, RangeFlag]:
    """Inverse of :func:`to_lns`: add ``B`` back and read as a float pattern."""
    if not 0 <= pattern <= 0xFF:
        raise ValueError("LNS pattern must be an 8-bit value")
    mag = pattern & 0x7F
    if mag & 0x40:
        mag -= 0x80
    value = mag + fmt.lns_bias
    return Fp8Bits((pattern & 0x80) | (value & 0x7F), fmt), _range_flag(value, fmt)


@dataclass(frozen=True)
class ApproxSpec:
    """Everything needed to evaluate one (operation, format, mode) cell."""

    op: OpKind
    format: Fp8Format
    mode: RoundingMode
    constant: int
    carry_rule: BoolExpr | None
    cell: TableCell

    @property
    def supported(self) -> bool:
        return self.cell.supported

    @property
    def rule_id(self) -> str:
        if not self.supported:
            return "---"
        if self.cell.kind is CellKind.RULE:
            return f"rule {self.cell.rule_id}"
        return self.cell.kind.value

    def with_constant(self, constant: int) -> ApproxSpec:
        return ApproxSpec(self.op, self.format, self.mode, constant & 0xFF, self.carry_rule, self.cell)

    def without_carry(self) -> ApproxSpec:
        return ApproxSpec(self.op, self.format, self.mode, self.constant, None, self.cell)


@lru_cache(maxsize=None)
def get_spec(op: OpKind | str, fmt: Fp8Format | str, mode: RoundingMode | str) -> ApproxSpec:
    """Executable spec for a cell. Unsupported cells are returned with ``supported == False``."""
    op, fmt, mode = OpKind.parse(op), get_format(fmt), RoundingMode.parse(mode)
    row = published_row(op, fmt)
    cell = row.cells[mode]
    rule = cell.effective_expr if cell.kind is CellKind.RULE else None
    return ApproxSpec(op, fmt, mode, (row.constant + cell.constant_offset) & 0xFF, rule, cell)


def uncorrected_spec(op: OpKind | str, fmt: Fp8Format | str, constant: int | None = None) -> ApproxSpec:
    """The plain LNS expression with no carry, at the row constant unless overridden."""
    op, fmt = OpKind.parse(op), get_format(fmt)
    if constant is None:
        constant = published_row(op, fmt).constant
    return ApproxSpec(op, fmt, RoundingMode.RNE, constant & 0xFF, None, _NO_CARRY)


def result_sign(op: OpKind, x: Fp8Bits, y: Fp8Bits | None = None) -> int:
    if op.is_binary:
        return x.sign ^ y.sign  # type: ignore[union-attr]
    if op is OpKind.RECIP:
        return x.sign
    return 0


def raw_magnitude(op: OpKind, constant: int, x_mag: int, y_mag: int = 0) -> int:
    """Unwrapped integer value of the LNS expression before the carry-in."""
    k = _signed8(constant)
    if op is OpKind.MUL:
        return x_mag + y_mag + k
    if op is OpKind.SQUARE:
        return (x_mag << 1) + k
    if op is OpKind.DIV:
        return x_mag - y_mag + k
    if op is OpKind.RECIP:
        return k - x_mag
    if op is OpKind.SQRT:
        return (x_mag >> 1) + k
    return ((-x_mag) >> 1) + k  # arithmetic shift of the negated magnitude


def _check_operands(op: OpKind, x: Fp8Bits, y: Fp8Bits | None) -> None:
    if op.is_binary != (y is not None):
        raise TypeError(f"{op.value} takes {'two operands' if op.is_binary else 'one operand'}")
    _require_normal(x)
    if y is not None:
        if y.format != x.format:
            raise ValueError("mixed-format operands are not supported")
        _require_normal(y)
    if op.is_root and x.sign:
        raise DomainError(f"{op.value} of a negative operand")


def carry_in(spec: ApproxSpec, x: Fp8Bits, y: Fp8Bits | None = None, sr: int | None = None) -> int:
    if not spec.supported:
        raise UnsupportedModeError(
            f"{spec.format.name} {spec.op.symbol} under {spec.mode.label} is a dash in the support table"
        )
    if spec.carry_rule is None:
        return 0
    if sr is None:
        sr = result_sign(spec.op, x, y)
    return spec.carry_rule(x.bits, y.bits if y is not None else 0, sr)


class ApproxResult(NamedTuple):
    result: Fp8Bits
    range_flag: RangeFlag
    carry: int


def approx_apply(spec: ApproxSpec, x: Fp8Bits, y: Fp8Bits | None = None) -> ApproxResult:
    """Evaluate the integer expression of ``spec``.

    The 7-bit magnitude addition wraps; ``range_flag`` tells whether the
    unwrapped value was a normal magnitude.
    """
    _check_operands(spec.op, x, y)
    if x.format != spec.format:
        raise ValueError("operand format does not match the spec")
    sr = result_sign(spec.op, x, y)
    c = carry_in(spec, x, y, sr)
    value = raw_magnitude(spec.op, spec.constant, x.magnitude, y.magnitude if y is not None else 0) + c
    bits = Fp8Bits((sr << 7) | (value & 0x7F), spec.format)
    return ApproxResult(bits, _range_flag(value, spec.format), c)


@dataclass(frozen=True)
class SupportCell:
    constant: int
    printed_constant: int
    entry: str  # "0", "1", "rule <id>" or "---"
    supported: bool
    note: str | None = None


def support_matrix(fmt: Fp8Format | str) -> dict[tuple[OpKind, RoundingMode], SupportCell]:
    fmt = get_format(fmt)
    out = {}
    for op in OpKind:
        row = published_row(op, fmt)
        for mode in RoundingMode:
            spec = get_spec(op, fmt, mode)
            out[(op, mode)] = SupportCell(
                constant=spec.constant,
                printed_constant=(row.printed_constant + spec.cell.constant_offset) & 0xFF,
                entry=spec.rule_id,
                supported=spec.supported,
                note=spec.cell.note,
            )
    return out
