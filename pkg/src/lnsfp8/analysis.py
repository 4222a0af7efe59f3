"""Exhaustive error analysis of the approximate operations.

Every sweep enumerates all admissible normal operands (all normal pairs
for binary operations, positive normals for square roots) and compares
the integer path against the exact oracle.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple

from .approx import (
    ApproxSpec,
    RangeFlag,
    _range_flag,
    get_spec,
    raw_magnitude,
    uncorrected_spec,
)
from .carry import BoolExpr, CellKind, published_row
from .errors import DomainError, UnsupportedModeError
from .exact import (
    IEEE_MODES,
    ExactValue,
    OpKind,
    RoundingMode,
    exact_op,
    exact_value,
    reference_outcomes,
)
from .formats import Fp8Bits, Fp8Format, get_format, normal_patterns

__all__ = [
    "UlpError",
    "ulp_error",
    "ErrorMap",
    "ErrorMapEntry",
    "error_map",
    "VerifyReport",
    "verify",
    "verify_all",
    "CarryTruthTable",
    "derive_carry",
    "PublishedDiff",
    "diff_published",
    "sweep",
]

_OVERFLOW, _UNDERFLOW = -1, -2
_MODE_INDEX = {m: i for i, m in enumerate(IEEE_MODES)}


# ---------------------------------------------------------------------------
# signed ulp error


def _sgn(v) -> int:
    return (v > 0) - (v < 0)


def _sign_one_root(a: Fraction, s: int, b: Fraction) -> int:
    """Sign of ``a + s*sqrt(b)``."""
    sa, g = _sgn(a), (s if b else 0)
    if g == 0 or sa == 0 or sa == g:
        return sa or g
    d = _sgn(a * a - b)
    return sa if d > 0 else (0 if d == 0 else g)


def _sign_two_roots(a: Fraction, s1: int, b1: Fraction, s2: int, b2: Fraction) -> int:
    """Sign of ``a + s1*sqrt(b1) + s2*sqrt(b2)``, decided with rational arithmetic only."""
    if not b1:
        return _sign_one_root(a, s2, b2)
    if not b2:
        return _sign_one_root(a, s1, b1)
    if s1 == s2:
        u = s1
    else:
        u = s1 * _sgn(b1 - b2)  # sign of the root sum
    sa = _sgn(a)
    if u == 0 or sa == 0 or sa == u:
        return sa or u
    # a and the root sum disagree: sign(a**2 - (root sum)**2) picks the winner
    d = _sign_one_root(a * a - b1 - b2, -s1 * s2, 4 * b1 * b2)
    return sa if d > 0 else (0 if d == 0 else u)


@dataclass(frozen=True)
class UlpError:
    """Signed error ``offset + root_sign*sqrt(radicand)`` in ulps of the result's binade.

    Rational errors have ``radicand == 0``. Positive values mean the
    result's magnitude is larger than the reference.
    """

    offset: Fraction
    radicand: Fraction = Fraction(0)
    root_sign: int = -1

    def __post_init__(self) -> None:
        r = self.radicand
        if r:
            rn, rd = math.isqrt(r.numerator), math.isqrt(r.denominator)
            if rn * rn == r.numerator and rd * rd == r.denominator:
                object.__setattr__(self, "offset", self.offset + self.root_sign * Fraction(rn, rd))
                r = Fraction(0)
        if not r:
            object.__setattr__(self, "radicand", Fraction(0))
            object.__setattr__(self, "root_sign", -1)

    @property
    def is_rational(self) -> bool:
        return self.radicand == 0

    @property
    def value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("error is irrational; use comparisons or float()")
        return self.offset

    def _sign_minus(self, other: UlpError | Fraction | int) -> int:
        """Sign of ``self - other``, exactly."""
        if not isinstance(other, UlpError):
            other = UlpError(Fraction(other))
        return _sign_two_roots(
            self.offset - other.offset,
            self.root_sign, self.radicand,
            -other.root_sign, other.radicand,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (UlpError, Fraction, int)):
            return NotImplemented
        return self._sign_minus(other) == 0

    def __hash__(self) -> int:
        return hash((self.offset, self.radicand, self.root_sign))

    def __lt__(self, other) -> bool:
        return self._sign_minus(other) < 0

    def __le__(self, other) -> bool:
        return self._sign_minus(other) <= 0

    def __gt__(self, other) -> bool:
        return self._sign_minus(other) > 0

    def __ge__(self, other) -> bool:
        return self._sign_minus(other) >= 0

    def __neg__(self) -> UlpError:
        return UlpError(-self.offset, self.radicand, -self.root_sign)

    def __abs__(self) -> UlpError:
        return self if self >= 0 else -self

    def __float__(self) -> float:
        return float(self.offset) + self.root_sign * math.sqrt(self.radicand)

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.offset)
        return f"{self.offset} {'+' if self.root_sign > 0 else '-'} sqrt({self.radicand})"


def ulp_error(result: Fp8Bits, z: ExactValue) -> UlpError:
    """Signed error of ``result`` against ``z`` in ulps of the result's binade.

    Measured on magnitudes: ``(|result| - |z|) * 2**(p-1) / 2**e`` with
    ``e`` the exponent of ``result``.
    """
    if not result.is_normal():
        raise DomainError(f"{result!r} is not a normal number")
    if z.is_zero():
        raise DomainError("reference value is zero")
    if result.sign != z.sign:
        raise DomainError("result and reference differ in sign")
    fmt = result.format
    r = abs(exact_value(result).as_fraction())
    inv_ulp = Fraction(2) ** (fmt.mantissa_bits - (result.exponent_field - fmt.bias))
    if not z.is_sqrt:
        return UlpError((r - z.radicand) * inv_ulp)
    return UlpError(r * inv_ulp, z.radicand * inv_ulp * inv_ulp)


# ---------------------------------------------------------------------------
# the exhaustive operand sweep


class Case(NamedTuple):
    x: int
    y: int | None
    z: ExactValue
    # reference pattern per IEEE mode; -1 overflow, -2 underflow
    refs: tuple[int, ...]


def operand_domain(op: OpKind, fmt: Fp8Format) -> list[tuple[int, int | None]]:
    if op.is_binary:
        pats = normal_patterns(fmt)
        return [(x, y) for x in pats for y in pats]
    return [(x, None) for x in normal_patterns(fmt, positive_only=op.is_root)]


@lru_cache(maxsize=None)
def sweep(op: OpKind, fmt: Fp8Format) -> tuple[Case, ...]:
    """Exact result and every IEEE reference for each admissible operand combination."""
    out = []
    for x, y in operand_domain(op, fmt):
        z = exact_op(op, Fp8Bits(x, fmt), Fp8Bits(y, fmt) if y is not None else None)
        refs = tuple(
            r.bits if isinstance(r, Fp8Bits) else (_OVERFLOW if r.direction == "overflow" else _UNDERFLOW)
            for r in reference_outcomes(z, fmt).values()
        )
        out.append(Case(x, y, z, refs))
    return tuple(out)


def _result_sign(op: OpKind, x: int, y: int | None) -> int:
    if op.is_binary:
        return (x ^ y) >> 7  # type: ignore[operator]
    if op is OpKind.RECIP:
        return x >> 7
    return 0


def _eval(spec: ApproxSpec, rule: BoolExpr | None, x: int, y: int | None) -> tuple[int, int, int]:
    """(unwrapped magnitude, result sign, carry) for raw pattern operands."""
    sr = _result_sign(spec.op, x, y)
    c = rule(x, y or 0, sr) if rule is not None else 0
    v = raw_magnitude(spec.op, spec.constant, x & 0x7F, (y or 0) & 0x7F) + c
    return v, sr, c


def _excluded_direction(code: int) -> str:
    return "overflow" if code == _OVERFLOW else "underflow"


# ---------------------------------------------------------------------------
# error maps


@dataclass(frozen=True)
class ErrorMapEntry:
    x: int
    y: int | None
    error: UlpError | None
    flag: str  # ok | overflow | underflow | unsupported_input


@dataclass
class ErrorMap:
    op: OpKind
    format: Fp8Format
    reference: str  # "exact" or a rounding-mode value
    constant: int
    use_carry: bool
    collapsed: bool
    entries: list[ErrorMapEntry] = field(default_factory=list)

    def errors(self) -> list[UlpError]:
        return [e.error for e in self.entries if e.error is not None]

    def min(self) -> UlpError:
        return _extreme(self.errors(), lowest=True)

    def max(self) -> UlpError:
        return _extreme(self.errors(), lowest=False)

    def excluded(self) -> dict[str, int]:
        counts: dict[str, int] = defaultdict(int)
        for e in self.entries:
            if e.flag != "ok":
                counts[e.flag] += 1
        return dict(counts)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x_bits", "y_bits", "ulp_error", "flag"])
        for e in self.entries:
            w.writerow([
                f"0x{e.x:02x}",
                "" if e.y is None else f"0x{e.y:02x}",
                "" if e.error is None else f"{float(e.error):.6f}",
                e.flag,
            ])
        return buf.getvalue()


def _extreme(values: Iterable[UlpError], lowest: bool) -> UlpError:
    best = None
    for v in values:
        if best is None or (v < best if lowest else v > best):
            best = v
    if best is None:
        raise ValueError("error map has no in-range entries")
    return best


def _representatives(fmt: Fp8Format, with_exponent_lsb: bool) -> list[int]:
    """Positive patterns in the binade of 1.0 (and the next one) covering every mantissa."""
    exps = (fmt.bias, fmt.bias + 1) if with_exponent_lsb else (fmt.bias,)
    exps = tuple(sorted(exps, key=lambda e: e & 1))
    return [(e << fmt.mantissa_bits) | m for e in exps for m in range(1 << fmt.mantissa_bits)]


def error_map(
    op: OpKind | str,
    fmt: Fp8Format | str,
    reference: RoundingMode | str = "exact",
    *,
    use_carry: bool = False,
    constant: int | None = None,
    collapse: bool = False,
) -> ErrorMap:
    """Signed ulp error of the approximate expression over the operand grid.

    ``reference`` is ``"exact"`` or an IEEE rounding mode. ``use_carry``
    applies that mode's carry rule and therefore requires a mode.
    ``collapse`` keeps one representative per mantissa combination (and
    exponent parity for square roots).
    """
    op, fmt = OpKind.parse(op), get_format(fmt)
    mode = None if reference == "exact" else RoundingMode.parse(reference)
    if mode is not None and not mode.is_ieee:
        raise ValueError("error maps need an exact or IEEE-mode reference")
    if use_carry:
        if mode is None:
            raise ValueError("use_carry needs a rounding-mode reference")
        spec = get_spec(op, fmt, mode)
        if not spec.supported:
            raise UnsupportedModeError(f"{fmt.name} {op.symbol} {mode.label} is a dash in the support table")
        if constant is not None:
            spec = spec.with_constant(constant)
    else:
        spec = uncorrected_spec(op, fmt, constant)
    rule = spec.carry_rule if use_carry else None

    if collapse:
        xs = _representatives(fmt, op.is_root)
        ys = _representatives(fmt, False) if op.is_binary else [None]
        grid = [(x, y) for x in xs for y in ys]
    elif op.is_binary:
        pats = normal_patterns(fmt)
        grid = [(x, y) for x in pats for y in pats]
    else:
        grid = [(x, None) for x in normal_patterns(fmt)]

    cases = {(c.x, c.y): c for c in sweep(op, fmt)}
    emap = ErrorMap(op, fmt, reference if mode is None else mode.value, spec.constant, use_carry, collapse)
    for x, y in grid:
        if op.is_root and x >> 7:
            emap.entries.append(ErrorMapEntry(x, y, None, "unsupported_input"))
            continue
        v, sr, _ = _eval(spec, rule, x, y)
        flag = _range_flag(v, fmt)
        if flag is not RangeFlag.IN_RANGE:
            emap.entries.append(ErrorMapEntry(x, y, None, flag.value))
            continue
        result = Fp8Bits((sr << 7) | v, fmt)
        case = cases[(x, y)]
        ref = case.refs[_MODE_INDEX[mode or RoundingMode.RNE]]
        if ref < 0:
            emap.entries.append(ErrorMapEntry(x, y, None, _excluded_direction(ref)))
            continue
        target = case.z if mode is None else exact_value(Fp8Bits(ref, fmt))
        emap.entries.append(ErrorMapEntry(x, y, ulp_error(result, target), "ok"))
    return emap


# ---------------------------------------------------------------------------
# exhaustive verification


@dataclass
class VerifyReport:
    op: str
    format: str
    mode: str
    supported: bool
    entry: str
    constant: str
    checked: int = 0
    excluded: int = 0
    excluded_overflow: int = 0
    excluded_underflow: int = 0
    mismatches: int = 0
    max_abs_ulp: str = "0"
    minterms_checked: int = 0
    offenders: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.supported or self.mismatches == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


_MAX_OFFENDERS = 32


def verify(
    op: OpKind | str,
    fmt: Fp8Format | str,
    mode: RoundingMode | str,
    *,
    rule: BoolExpr | str | None = None,
    constant: int | None = None,
) -> VerifyReport:
    """Compare the cell's integer path with the oracle over every admissible operand.

    ``rule`` and ``constant`` override the cell's carry rule and constant.
    Faithful cells pass when every result is ``RD(z)`` or ``RU(z)``.
    ``max_abs_ulp`` is the largest distance from the reference, in ulps of
    the produced result.
    """
    op, fmt, mode = OpKind.parse(op), get_format(fmt), RoundingMode.parse(mode)
    spec = get_spec(op, fmt, mode)
    report = VerifyReport(op.value, fmt.name, mode.value, spec.supported, spec.rule_id, f"0x{spec.constant:02X}")
    if not spec.supported:
        return report
    if isinstance(rule, str):
        rule = BoolExpr(rule)
    if rule is None:
        rule = spec.carry_rule
    if constant is not None:
        spec = spec.with_constant(constant)
        report.constant = f"0x{spec.constant:02X}"

    minterms = set()
    worst = UlpError(Fraction(0))
    lo_i, hi_i = _MODE_INDEX[RoundingMode.RD], _MODE_INDEX[RoundingMode.RU]
    for case in sweep(op, fmt):
        if mode is RoundingMode.FAITHFUL:
            allowed = (case.refs[lo_i], case.refs[hi_i])
        else:
            allowed = (case.refs[_MODE_INDEX[mode]],)
        bad = [a for a in allowed if a < 0]
        if bad:
            report.excluded += 1
            if bad[0] == _OVERFLOW:
                report.excluded_overflow += 1
            else:
                report.excluded_underflow += 1
            continue
        report.checked += 1
        v, sr, _ = _eval(spec, rule, case.x, case.y)
        if rule is not None:
            minterms.add(tuple(_env_bits(rule.variables, case.x, case.y, sr)))
        in_range = _range_flag(v, fmt) is RangeFlag.IN_RANGE
        got = (sr << 7) | (v & 0x7F)
        if in_range and got in allowed:
            continue
        report.mismatches += 1
        if in_range:
            dist = min((abs(ulp_error(Fp8Bits(got, fmt), exact_value(Fp8Bits(a, fmt)))) for a in allowed),
                       key=float)
            if dist > worst:
                worst = dist
        if len(report.offenders) < _MAX_OFFENDERS:
            report.offenders.append({
                "x": f"0x{case.x:02X}",
                "y": None if case.y is None else f"0x{case.y:02X}",
                "got": f"0x{got:02X}",
                "range_flag": _range_flag(v, fmt).value,
                "expected": [f"0x{a:02X}" for a in allowed],
            })
    report.max_abs_ulp = str(worst)
    report.minterms_checked = len(minterms)
    return report


def verify_all(fmt: Fp8Format | str, *, include_faithful: bool = True) -> list[VerifyReport]:
    """Every supported cell of the format's support table."""
    fmt = get_format(fmt)
    modes = list(RoundingMode) if include_faithful else list(IEEE_MODES)
    return [
        verify(op, fmt, mode)
        for op in OpKind
        for mode in modes
        if get_spec(op, fmt, mode).supported
    ]


def _env_bits(names: tuple[str, ...], x: int, y: int | None, sr: int) -> list[int]:
    out = []
    for n in names:
        if n == "sr":
            out.append(sr)
        else:
            out.append(((x if n[0] == "x" else (y or 0)) >> int(n[1:])) & 1)
    return out


# ---------------------------------------------------------------------------
# carry derivation


@dataclass
class CarryTruthTable:
    """Carry-in required by the oracle, tabulated over a small set of operand bits.

    ``table`` maps an assignment of ``support`` to 0, 1 or ``None``
    (infeasible: the required correction is not a single value in {0, 1}).
    ``requirements`` holds the observed corrections per assignment.
    """

    op: OpKind
    format: Fp8Format
    mode: RoundingMode
    constant: int
    support: tuple[str, ...]
    table: dict[tuple[int, ...], int | None]
    requirements: dict[tuple[int, ...], tuple[int, ...]]
    feasible_constants: tuple[int, ...] = ()

    @property
    def feasible(self) -> bool:
        return all(v is not None for v in self.table.values())

    @property
    def feasible_with_decrement(self) -> bool:
        """Whether the constant or the constant minus one admits a {0, 1} carry."""
        return bool(self.feasible_constants)

    def infeasible_cells(self) -> list[dict[str, int]]:
        return [dict(zip(self.support, k)) for k, v in self.table.items() if v is None]

    def lookup(self, x: int, y: int | None, sr: int) -> int | None:
        return self.table.get(tuple(_env_bits(self.support, x, y, sr)))

    def to_dict(self) -> dict:
        return {
            "op": self.op.value,
            "format": self.format.name,
            "mode": self.mode.value,
            "constant": f"0x{self.constant:02X}",
            "support": list(self.support),
            "feasible": self.feasible,
            "feasible_constants": [f"0x{k:02X}" for k in self.feasible_constants],
            "rows": [
                {
                    "inputs": dict(zip(self.support, k)),
                    "carry": "infeasible" if v is None else v,
                    "required": list(self.requirements[k]),
                }
                for k, v in sorted(self.table.items())
            ],
        }


def _support_tiers(op: OpKind, fmt: Fp8Format) -> list[tuple[str, ...]]:
    mb = fmt.mantissa_bits
    mant = tuple(f"x{i}" for i in range(mb))
    if op.is_binary:
        mant += tuple(f"y{i}" for i in range(mb))
    tiers = [mant]
    if op.is_binary:
        tiers.append(("sr",) + mant)
    elif op is OpKind.RECIP:
        tiers.append(mant + ("x7",))  # the result sign is the operand sign
    tiers.append(tiers[-1] + (f"x{mb}",))
    return tiers


def _requirements(op: OpKind, fmt: Fp8Format, mode: RoundingMode, constant: int):
    """Required correction (reference magnitude minus raw magnitude) per full-support key."""
    idx = _MODE_INDEX[mode]
    full = _support_tiers(op, fmt)[-1]
    if "sr" not in full:
        full = ("sr",) + full
    need: dict[tuple[int, ...], set[int]] = defaultdict(set)
    for case in sweep(op, fmt):
        ref = case.refs[idx]
        if ref < 0:
            continue
        sr = _result_sign(op, case.x, case.y)
        raw = raw_magnitude(op, constant, case.x & 0x7F, (case.y or 0) & 0x7F)
        need[tuple(_env_bits(full, case.x, case.y, sr))].add((ref & 0x7F) - raw)
    return full, need


def _project(full, need, support):
    pos = [full.index(v) for v in support]
    out: dict[tuple[int, ...], set[int]] = defaultdict(set)
    for k, vals in need.items():
        out[tuple(k[i] for i in pos)] |= vals
    return out


def _tabulate(op, fmt, mode, constant):
    full, need = _requirements(op, fmt, mode, constant)
    tiers = _support_tiers(op, fmt)
    chosen, proj = tiers[-1], None
    for tier in tiers:
        p = _project(full, need, tier)
        if all(len(v) == 1 for v in p.values()):
            chosen, proj = tier, p
            break
    if proj is None:
        proj = _project(full, need, chosen)
    table = {k: (next(iter(v)) if len(v) == 1 and next(iter(v)) in (0, 1) else None) for k, v in proj.items()}
    reqs = {k: tuple(sorted(v)) for k, v in proj.items()}
    return chosen, dict(sorted(table.items())), reqs


def derive_carry(
    op: OpKind | str,
    fmt: Fp8Format | str,
    mode: RoundingMode | str,
    constant: int | None = None,
) -> CarryTruthTable:
    """Derive the carry-in a mode needs from scratch, by exhaustive sweep.

    The support starts at the mantissa bits and grows by the result sign
    and then the exponent LSB until the required correction is a function
    of the chosen bits. ``constant`` defaults to the published row constant.
    """
    op, fmt, mode = OpKind.parse(op), get_format(fmt), RoundingMode.parse(mode)
    if not mode.is_ieee:
        raise ValueError("carry derivation needs an IEEE rounding mode")
    if constant is None:
        constant = published_row(op, fmt).constant
    constant &= 0xFF
    support, table, reqs = _tabulate(op, fmt, mode, constant)
    result = CarryTruthTable(op, fmt, mode, constant, support, table, reqs)
    feasible = []
    if result.feasible:
        feasible.append(constant)
    dec = (constant - 1) & 0xFF
    _, dec_table, _ = _tabulate(op, fmt, mode, dec)
    if all(v is not None for v in dec_table.values()):
        feasible.append(dec)
    result.feasible_constants = tuple(feasible)
    return result


# ---------------------------------------------------------------------------
# published vs derived


@dataclass
class PublishedDiff:
    op: str
    format: str
    mode: str
    printed: str
    derived_support: tuple[str, ...]
    match: bool
    mismatches: list[dict]

    def to_dict(self) -> dict:
        return asdict(self)


def diff_published(op: OpKind | str, fmt: Fp8Format | str, mode: RoundingMode | str) -> PublishedDiff:
    """Minterm-level comparison of the printed carry expression with the derived table.

    Minterms are assignments of the union of both supports; those never
    reached by an in-range operand are don't-cares.
    """
    op, fmt, mode = OpKind.parse(op), get_format(fmt), RoundingMode.parse(mode)
    if not mode.is_ieee:
        raise ValueError("faithful cells have no unique derived carry")
    spec = get_spec(op, fmt, mode)
    cell = spec.cell
    if cell.kind is CellKind.RULE:
        printed = cell.printed_expr
    elif cell.kind is CellKind.ZERO and cell.constant_offset == 0:
        printed = BoolExpr("0")
    else:
        raise ValueError(f"{fmt.name} {op.symbol} {mode.label} has no printed carry expression")
    derived = derive_carry(op, fmt, mode, spec.constant)
    union = tuple(sorted(set(derived.support) | set(printed.variables),
                         key=lambda n: (0, 0) if n == "sr" else (1 if n[0] == "x" else 2, int(n[1:]))))
    idx = _MODE_INDEX[mode]
    seen: dict[tuple[int, ...], dict] = {}
    for case in sweep(op, fmt):
        if case.refs[idx] < 0:
            continue
        sr = _result_sign(op, case.x, case.y)
        key = tuple(_env_bits(union, case.x, case.y, sr))
        if key in seen:
            continue
        want = derived.lookup(case.x, case.y, sr)
        got = printed(case.x, case.y or 0, sr)
        if want != got:
            seen[key] = {
                "inputs": dict(zip(union, key)),
                "derived": "infeasible" if want is None else want,
                "printed": got,
                "example": {"x": f"0x{case.x:02X}", "y": None if case.y is None else f"0x{case.y:02X}"},
            }
        else:
            seen[key] = {}
    mismatches = [v for _, v in sorted(seen.items()) if v]
    return PublishedDiff(op.value, fmt.name, mode.value, printed.text, derived.support, not mismatches, mismatches)
