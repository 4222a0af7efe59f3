"""Exact operand values, exact operation results and the correctly rounding oracle.

Every rounding decision here is made with unbounded integers. Square roots
are never evaluated numerically: a result ``sqrt(r)`` is kept as its
radicand and compared against candidates through their squares.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import DomainError, OutOfRangeError, UnsupportedClassError
from .formats import Fp8Bits, Fp8Class, Fp8Format, encode

__all__ = [
    "RoundingMode",
    "IEEE_MODES",
    "OpKind",
    "ExactValue",
    "exact_value",
    "exact_op",
    "round_reference",
    "is_faithful",
    "faithful_bracket",
]


class RoundingMode(enum.Enum):
    RNE = "rne"
    RNA = "rna"
    RNZ = "rnz"
    RU = "ru"
    RD = "rd"
    RZ = "rz"
    FAITHFUL = "faithful"

    @property
    def is_ieee(self) -> bool:
        return self is not RoundingMode.FAITHFUL

    @property
    def label(self) -> str:
        return _MODE_LABELS[self]

    @classmethod
    def parse(cls, text: str | RoundingMode) -> RoundingMode:
        if isinstance(text, RoundingMode):
            return text
        key = text.lower()
        if key in ("f", "faith"):
            key = "faithful"
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown rounding mode {text!r}") from None


_MODE_LABELS = {
    RoundingMode.RNE: "RNe",
    RoundingMode.RNA: "RNa",
    RoundingMode.RNZ: "RNz",
    RoundingMode.RU: "RU",
    RoundingMode.RD: "RD",
    RoundingMode.RZ: "RZ",
    RoundingMode.FAITHFUL: "Faithful",
}

IEEE_MODES = tuple(m for m in RoundingMode if m.is_ieee)


class OpKind(enum.Enum):
    MUL = "mul"
    SQUARE = "square"
    DIV = "div"
    RECIP = "recip"
    SQRT = "sqrt"
    RSQRT = "rsqrt"

    @property
    def is_binary(self) -> bool:
        return self in (OpKind.MUL, OpKind.DIV)

    @property
    def is_root(self) -> bool:
        return self in (OpKind.SQRT, OpKind.RSQRT)

    @property
    def symbol(self) -> str:
        return _OP_SYMBOLS[self]

    @classmethod
    def parse(cls, text: str | OpKind) -> OpKind:
        if isinstance(text, OpKind):
            return text
        key = _OP_ALIASES.get(text.lower(), text.lower())
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown operation {text!r}") from None


_OP_SYMBOLS = {
    OpKind.MUL: "x×y",
    OpKind.SQUARE: "x²",
    OpKind.DIV: "x/y",
    OpKind.RECIP: "1/x",
    OpKind.SQRT: "√x",
    OpKind.RSQRT: "1/√x",
}
_OP_ALIASES = {"sq": "square", "rec": "recip", "reciprocal": "recip", "inv": "recip"}


@dataclass(frozen=True)
class ExactValue:
    """``(-1)**sign * num/den``, or ``(-1)**sign * sqrt(num/den)`` when ``is_sqrt``.

    ``num/den`` is kept in lowest terms so structural equality is value
    equality within each kind.
    """

    sign: int
    num: int
    den: int = 1
    is_sqrt: bool = False

    def __post_init__(self) -> None:
        if self.den <= 0 or self.num < 0:
            raise ValueError("ExactValue needs num >= 0 and den > 0")
        g = math.gcd(self.num, self.den)
        if g > 1:
            object.__setattr__(self, "num", self.num // g)
            object.__setattr__(self, "den", self.den // g)
        if self.num == 0:
            object.__setattr__(self, "sign", 0)

    @classmethod
    def from_fraction(cls, q: Fraction | int) -> ExactValue:
        q = Fraction(q)
        return cls(1 if q < 0 else 0, abs(q.numerator), q.denominator)

    @classmethod
    def sqrt_of(cls, q: Fraction | int) -> ExactValue:
        q = Fraction(q)
        if q < 0:
            raise DomainError("square root of a negative value")
        return cls(0, q.numerator, q.denominator, True)

    @property
    def radicand(self) -> Fraction:
        """``num/den`` as a Fraction (the radicand for square-root values)."""
        return Fraction(self.num, self.den)

    def is_zero(self) -> bool:
        return self.num == 0

    def as_fraction(self) -> Fraction:
        """Exact rational value; fails for irrational square roots."""
        q = self.radicand
        if self.is_sqrt:
            rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
            if rn * rn != q.numerator or rd * rd != q.denominator:
                raise ValueError("value is irrational")
            q = Fraction(rn, rd)
        return -q if self.sign else q

    def compare(self, c: Fraction | int) -> int:
        """Sign of ``self - c``, decided exactly."""
        c = Fraction(c)
        if not self.is_sqrt:
            d = Fraction(self.num, self.den) * (-1 if self.sign else 1) - c
            return (d > 0) - (d < 0)
        # sqrt values are non-negative
        if c < 0:
            return 1 if self.num else 0
        lhs, rhs = self.radicand, c * c
        return (lhs > rhs) - (lhs < rhs)

    def __float__(self) -> float:
        v = self.num / self.den
        if self.is_sqrt:
            v = math.sqrt(v)
        return -v if self.sign else v

    def __repr__(self) -> str:
        body = f"{self.num}/{self.den}" if self.den != 1 else str(self.num)
        if self.is_sqrt:
            body = f"sqrt({body})"
        return f"ExactValue({'-' if self.sign else ''}{body})"


def _scaled(sign: int, sig: int, exp: int, is_sqrt: bool = False) -> ExactValue:
    """``(-1)**sign * sig * 2**exp`` (under a square root when ``is_sqrt``)."""
    if exp >= 0:
        return ExactValue(sign, sig << exp, 1, is_sqrt)
    return ExactValue(sign, sig, 1 << -exp, is_sqrt)


def _require_normal(bits: Fp8Bits, *, allow_zero: bool = False) -> None:
    cls = bits.classify()
    if cls is Fp8Class.NORMAL or (allow_zero and cls is Fp8Class.ZERO):
        return
    raise UnsupportedClassError(f"{bits!r} is {cls.value}; only normal operands are supported")


def _significand(bits: Fp8Bits) -> tuple[int, int]:
    """Integer significand (hidden bit included) and the exponent of its last place."""
    fmt = bits.format
    sig = (1 << fmt.mantissa_bits) | bits.mantissa_field
    return sig, bits.exponent_field - fmt.bias - fmt.mantissa_bits


def exact_value(bits: Fp8Bits) -> ExactValue:
    _require_normal(bits, allow_zero=True)
    if bits.classify() is Fp8Class.ZERO:
        return ExactValue(0, 0)
    sig, exp = _significand(bits)
    return _scaled(bits.sign, sig, exp)


def exact_op(op: OpKind | str, x: Fp8Bits, y: Fp8Bits | None = None) -> ExactValue:
    """Mathematically exact result of ``op`` on normal operands."""
    op = OpKind.parse(op)
    if op.is_binary != (y is not None):
        raise TypeError(f"{op.value} takes {'two operands' if op.is_binary else 'one operand'}")
    _require_normal(x)
    sx, ex = _significand(x)
    if y is not None:
        if y.format != x.format:
            raise ValueError("mixed-format operands are not supported")
        _require_normal(y)
        sy, ey = _significand(y)
        sign = x.sign ^ y.sign
        if op is OpKind.MUL:
            return _scaled(sign, sx * sy, ex + ey)
        # normal operands are never zero, so the quotient is always defined
        v = _scaled(sign, sx, ex - ey)
        return ExactValue(sign, v.num, v.den * sy)
    if op is OpKind.SQUARE:
        return _scaled(0, sx * sx, 2 * ex)
    if op is OpKind.RECIP:
        v = _scaled(x.sign, 1, -ex)
        return ExactValue(x.sign, v.num, v.den * sx)
    if x.sign:
        raise DomainError(f"{op.value} of a negative operand")
    if op is OpKind.SQRT:
        return _scaled(0, sx, ex, is_sqrt=True)
    v = _scaled(0, 1, -ex)
    return ExactValue(0, v.num, v.den * sx, True)


class _Split(NamedTuple):
    """Position of ``|z|`` relative to the representable grid of its binade.

    ``|z|`` lies in ``[k, k+1) * 2**(e - mantissa_bits)`` with
    ``2**mantissa_bits <= k < 2**precision``. ``half`` is the sign of the
    remainder minus one half ulp.
    """

    e: int
    k: int
    exact: bool
    half: int


def _floor_log2(n: int, d: int) -> int:
    e = n.bit_length() - d.bit_length()
    if (n < d << e) if e >= 0 else (n << -e < d):
        e -= 1
    return e


def _split(z: ExactValue, mantissa_bits: int) -> _Split:
    n, d = z.num, z.den
    if n == 0:
        raise DomainError("cannot round zero")
    if not z.is_sqrt:
        e = _floor_log2(n, d)
        s = e - mantissa_bits
        if s >= 0:
            d <<= s
        else:
            n <<= -s
        k, rem = divmod(n, d)
        twice = 2 * rem
        return _Split(e, k, rem == 0, (twice > d) - (twice < d))
    e = _floor_log2(n, d) >> 1
    s = e - mantissa_bits
    if s >= 0:
        d <<= 2 * s
    else:
        n <<= -2 * s
    k = math.isqrt(n // d)
    lhs, mid = 4 * n, (2 * k + 1) ** 2 * d
    return _Split(e, k, k * k * d == n, (lhs > mid) - (lhs < mid))


def _rounds_up(split: _Split, sign: int, mode: RoundingMode) -> bool:
    """Whether the magnitude moves to the next grid point."""
    if split.exact:
        return False
    if mode is RoundingMode.RZ:
        return False
    if mode is RoundingMode.RU:
        return sign == 0
    if mode is RoundingMode.RD:
        return sign == 1
    if split.half:
        return split.half > 0
    if mode is RoundingMode.RNE:
        return bool(split.k & 1)
    if mode is RoundingMode.RNA:
        return True
    if mode is RoundingMode.RNZ:
        return False
    raise ValueError(f"{mode.label} is not a quantizing rounding mode")


def _quantize(split: _Split, sign: int, mode: RoundingMode, fmt: Fp8Format) -> Fp8Bits:
    e, k = split.e, split.k
    if _rounds_up(split, sign, mode):
        k += 1
        if k >> fmt.precision:
            k >>= 1
            e += 1
    biased = e + fmt.bias
    if biased < 1:
        raise OutOfRangeError("underflow")
    if biased >= fmt.max_exponent_field:
        raise OutOfRangeError("overflow")
    return encode(sign, biased, k & fmt.mantissa_mask, fmt)


def round_reference(z: ExactValue, fmt: Fp8Format, mode: RoundingMode | str) -> Fp8Bits:
    """Correctly round ``z`` to a normal number of ``fmt``.

    The exponent range is treated as unbounded while rounding; a result
    outside the normal binades raises :class:`OutOfRangeError`.
    """
    mode = RoundingMode.parse(mode)
    if not mode.is_ieee:
        raise ValueError("faithful rounding is a predicate; use is_faithful")
    return _quantize(_split(z, fmt.mantissa_bits), z.sign, mode, fmt)


def faithful_bracket(z: ExactValue, fmt: Fp8Format) -> tuple[Fp8Bits, Fp8Bits]:
    """``(RD(z), RU(z))``; both must be normal."""
    split = _split(z, fmt.mantissa_bits)
    return (
        _quantize(split, z.sign, RoundingMode.RD, fmt),
        _quantize(split, z.sign, RoundingMode.RU, fmt),
    )


def is_faithful(result: Fp8Bits, z: ExactValue, fmt: Fp8Format) -> bool:
    lo, hi = faithful_bracket(z, fmt)
    return result.bits in (lo.bits, hi.bits)


def reference_outcomes(z: ExactValue, fmt: Fp8Format) -> dict[RoundingMode, Fp8Bits | OutOfRangeError]:
    """Every IEEE-mode reference for ``z`` from a single split."""
    split = _split(z, fmt.mantissa_bits)
    out: dict[RoundingMode, Fp8Bits | OutOfRangeError] = {}
    for mode in IEEE_MODES:
        try:
            out[mode] = _quantize(split, z.sign, mode, fmt)
        except OutOfRangeError as exc:
            out[mode] = exc
    return out
