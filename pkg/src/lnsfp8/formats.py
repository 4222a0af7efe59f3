"""8-bit floating-point format descriptors and bit-level encode/decode."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

from .errors import FieldRangeError

__all__ = [
    "Fp8Format",
    "Fp8Bits",
    "Fp8Class",
    "Decoded",
    "E5M2",
    "E4M3",
    "FORMATS",
    "get_format",
    "decode",
    "encode",
    "normal_patterns",
]


@dataclass(frozen=True)
class Fp8Format:
    """Static layout of an 8-bit binary floating-point format.

    One sign bit, ``exponent_bits`` biased exponent bits and
    ``mantissa_bits`` trailing significand bits.
    """

    name: str
    exponent_bits: int
    mantissa_bits: int

    def __post_init__(self) -> None:
        if self.exponent_bits + self.mantissa_bits != 7:
            raise ValueError("exponent_bits + mantissa_bits must be 7")
        if self.exponent_bits < 2 or self.mantissa_bits < 1:
            raise ValueError("need at least 2 exponent bits and 1 mantissa bit")

    @property
    def bias(self) -> int:
        return (1 << (self.exponent_bits - 1)) - 1

    @property
    def precision(self) -> int:
        """Significand precision ``p`` including the hidden bit."""
        return self.mantissa_bits + 1

    @property
    def lns_bias(self) -> int:
        """Bias pattern ``B = bias << mantissa_bits`` (0x3C for E5M2, 0x38 for E4M3)."""
        return self.bias << self.mantissa_bits

    @property
    def max_exponent_field(self) -> int:
        return (1 << self.exponent_bits) - 1

    @property
    def mantissa_mask(self) -> int:
        return (1 << self.mantissa_bits) - 1

    @property
    def emin(self) -> int:
        return 1 - self.bias

    @property
    def emax(self) -> int:
        # the maximum-exponent binade is never treated as normal here
        return self.max_exponent_field - 1 - self.bias

    @property
    def min_magnitude(self) -> int:
        """Smallest 7-bit magnitude pattern of a normal number."""
        return 1 << self.mantissa_bits

    @property
    def max_magnitude(self) -> int:
        """Largest 7-bit magnitude pattern of a normal number."""
        return (self.max_exponent_field << self.mantissa_bits) - 1

    def __str__(self) -> str:
        return self.name


E5M2 = Fp8Format("E5M2", 5, 2)
E4M3 = Fp8Format("E4M3", 4, 3)
FORMATS = {"e5m2": E5M2, "e4m3": E4M3}


def get_format(name: str | Fp8Format) -> Fp8Format:
    if isinstance(name, Fp8Format):
        return name
    try:
        return FORMATS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown format {name!r}; expected one of {sorted(FORMATS)}") from None


class Fp8Class(enum.Enum):
    ZERO = "zero"
    SUBNORMAL = "subnormal"
    NORMAL = "normal"
    MAX_EXPONENT = "maximum-exponent"


class Decoded(NamedTuple):
    sign: int
    biased_exponent: int
    integral_significand: int
    cls: Fp8Class


@dataclass(frozen=True)
class Fp8Bits:
    """An 8-bit pattern read under a given format."""

    bits: int
    format: Fp8Format

    def __post_init__(self) -> None:
        if not 0 <= self.bits <= 0xFF:
            raise FieldRangeError(f"pattern {self.bits!r} is not an 8-bit value")

    @property
    def sign(self) -> int:
        return self.bits >> 7

    @property
    def exponent_field(self) -> int:
        return (self.bits >> self.format.mantissa_bits) & self.format.max_exponent_field

    @property
    def mantissa_field(self) -> int:
        return self.bits & self.format.mantissa_mask

    @property
    def magnitude(self) -> int:
        """Exponent and mantissa fields as one 7-bit integer."""
        return self.bits & 0x7F

    def bit(self, i: int) -> int:
        return (self.bits >> i) & 1

    def classify(self) -> Fp8Class:
        e = self.exponent_field
        if e == 0:
            return Fp8Class.ZERO if self.mantissa_field == 0 else Fp8Class.SUBNORMAL
        if e == self.format.max_exponent_field:
            return Fp8Class.MAX_EXPONENT
        return Fp8Class.NORMAL

    def is_normal(self) -> bool:
        return 0 < self.exponent_field < self.format.max_exponent_field

    def __float__(self) -> float:
        from .exact import exact_value

        return float(exact_value(self))

    def __repr__(self) -> str:
        return f"Fp8Bits(0x{self.bits:02X}, {self.format.name})"


def decode(bits: Fp8Bits) -> Decoded:
    return Decoded(bits.sign, bits.exponent_field, bits.mantissa_field, bits.classify())


def encode(sign: int, biased_exponent: int, integral_significand: int, fmt: Fp8Format) -> Fp8Bits:
    if sign not in (0, 1):
        raise FieldRangeError(f"sign must be 0 or 1, got {sign}")
    if not 0 <= biased_exponent <= fmt.max_exponent_field:
        raise FieldRangeError(f"exponent field {biased_exponent} does not fit {fmt.exponent_bits} bits")
    if not 0 <= integral_significand <= fmt.mantissa_mask:
        raise FieldRangeError(
            f"significand field {integral_significand} does not fit {fmt.mantissa_bits} bits"
        )
    bits = (sign << 7) | (biased_exponent << fmt.mantissa_bits) | integral_significand
    return Fp8Bits(bits, fmt)


def normal_patterns(fmt: Fp8Format, *, positive_only: bool = False) -> list[int]:
    """All normal bit patterns of ``fmt`` in ascending pattern order."""
    top = 0x80 if positive_only else 0x100
    return [b for b in range(top) if 0 < (b >> fmt.mantissa_bits) & fmt.max_exponent_field < fmt.max_exponent_field]
