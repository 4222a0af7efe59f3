from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lnsfp8 import E4M3, E5M2, ExactValue, Fp8Bits, OpKind, RoundingMode, exact_op, exact_value, round_reference
from lnsfp8.analysis import sweep
from lnsfp8.errors import DomainError, OutOfRangeError, UnsupportedClassError
from lnsfp8.exact import IEEE_MODES, faithful_bracket, is_faithful
from lnsfp8.formats import normal_patterns

import oracles

FORMATS = [E5M2, E4M3]


def _val(b: Fp8Bits) -> Fraction:
    return exact_value(b).as_fraction()


# --- examples -------------------------------------------------------------


def test_tie_examples():
    z = ExactValue.from_fraction(Fraction(9, 4))
    assert round_reference(z, E5M2, "rne").bits == 0x40
    assert round_reference(z, E5M2, "rna").bits == 0x41


@pytest.mark.parametrize("fmt", FORMATS)
@pytest.mark.parametrize("mode", IEEE_MODES)
def test_one_is_a_fixed_point(fmt, mode):
    assert round_reference(ExactValue.from_fraction(1), fmt, mode).bits == fmt.lns_bias


def test_exact_op_examples():
    x = Fp8Bits(0x3E, E5M2)
    assert exact_op("mul", x, x).as_fraction() == Fraction(9, 4)
    assert exact_op("recip", Fp8Bits(0x3D, E5M2)).as_fraction() == Fraction(4, 5)
    root2 = exact_op("sqrt", Fp8Bits(0x40, E4M3))
    assert root2.is_sqrt and root2.radicand == 2
    assert root2.compare(Fraction(3, 2)) < 0
    assert exact_op("rsqrt", Fp8Bits(0x40, E4M3)).radicand == Fraction(1, 2)


def test_is_faithful_examples():
    z = ExactValue.from_fraction(Fraction(9, 4))
    assert is_faithful(Fp8Bits(0x40, E5M2), z, E5M2)
    assert is_faithful(Fp8Bits(0x41, E5M2), z, E5M2)
    assert not is_faithful(Fp8Bits(0x42, E5M2), z, E5M2)


def test_domain_and_class_errors():
    with pytest.raises(DomainError):
        exact_op("sqrt", Fp8Bits(0xBC, E5M2))
    with pytest.raises(UnsupportedClassError):
        exact_op("div", Fp8Bits(0x3C, E5M2), Fp8Bits(0x00, E5M2))
    with pytest.raises(ValueError):
        round_reference(ExactValue.from_fraction(1), E5M2, "faithful")


def test_out_of_range_carries_direction():
    big = ExactValue.from_fraction(2**16)
    tiny = ExactValue.from_fraction(Fraction(1, 2**16))
    with pytest.raises(OutOfRangeError) as ov:
        round_reference(big, E5M2, "rz")
    with pytest.raises(OutOfRangeError) as un:
        round_reference(tiny, E5M2, "ru")
    assert ov.value.direction == "overflow" and un.value.direction == "underflow"


# --- exhaustive agreement with the enumeration oracle ----------------------


@pytest.mark.parametrize("fmt", FORMATS, ids=lambda f: f.name)
@pytest.mark.parametrize("op", list(OpKind), ids=lambda o: o.value)
def test_reference_matches_enumeration(fmt, op):
    bad = []
    for case in sweep(op, fmt):
        sign, q, is_sqrt = oracles.exact(fmt.name, op.value, case.x, case.y)
        for mode, got in zip(oracles.IEEE, case.refs):
            want = oracles.round_enum(fmt.name, sign, q, is_sqrt, mode)
            want = {"overflow": -1, "underflow": -2}.get(want, want)
            if got != want:
                bad.append((case.x, case.y, mode, got, want))
    assert not bad, bad[:5]


# --- invariants -----------------------------------------------------------


@pytest.mark.parametrize("fmt", FORMATS, ids=lambda f: f.name)
def test_representable_values_are_fixed_points(fmt):
    for b in normal_patterns(fmt):
        z = exact_value(Fp8Bits(b, fmt))
        for mode in IEEE_MODES:
            assert round_reference(z, fmt, mode).bits == b


@pytest.mark.parametrize("fmt", FORMATS, ids=lambda f: f.name)
@pytest.mark.parametrize("op", list(OpKind), ids=lambda o: o.value)
def test_mode_ordering(fmt, op):
    for case in sweep(op, fmt):
        if min(case.refs) < 0:
            continue
        v = {m: oracles.value(fmt.name, b) for m, b in zip(IEEE_MODES, case.refs)}
        lo, hi = v[RoundingMode.RD], v[RoundingMode.RU]
        assert case.z.compare(lo) >= 0 and case.z.compare(hi) <= 0
        for m in (RoundingMode.RNE, RoundingMode.RNA, RoundingMode.RNZ, RoundingMode.RZ):
            assert lo <= v[m] <= hi
        positive = case.z.sign == 0
        assert v[RoundingMode.RZ] == (lo if positive else hi)


@pytest.mark.parametrize("fmt", FORMATS, ids=lambda f: f.name)
def test_tie_discipline_on_every_midpoint(fmt):
    pats = sorted(normal_patterns(fmt, positive_only=True), key=lambda b: oracles.value(fmt.name, b))
    for sign in (0, 1):
        for a, b in zip(pats, pats[1:]):
            mid = (oracles.value(fmt.name, a) + oracles.value(fmt.name, b)) / 2
            z = ExactValue.from_fraction(-mid if sign else mid)
            rne = round_reference(z, fmt, "rne")
            assert rne.bits & 0x7F in (a, b) and rne.mantissa_field % 2 == 0
            assert round_reference(z, fmt, "rna").bits & 0x7F == b
            assert round_reference(z, fmt, "rnz").bits & 0x7F == a
            assert rne.sign == sign


@pytest.mark.parametrize("fmt", FORMATS, ids=lambda f: f.name)
def test_sqrt_brackets_are_sound(fmt):
    for b in normal_patterns(fmt, positive_only=True):
        for op in ("sqrt", "rsqrt"):
            z = exact_op(op, Fp8Bits(b, fmt))
            try:
                lo, hi = faithful_bracket(z, fmt)
            except OutOfRangeError:
                continue
            r = z.radicand
            c1, c2 = _val(lo), _val(hi)
            assert c1 * c1 <= r <= c2 * c2
            if c1 != c2:
                assert c1 * c1 < r < c2 * c2


@settings(max_examples=300, deadline=None)
@given(
    num=st.integers(min_value=1, max_value=10**6),
    den=st.integers(min_value=1, max_value=10**6),
    fmt=st.sampled_from(FORMATS),
)
def test_sqrt_rounding_never_consults_floats(num, den, fmt):
    r = Fraction(num, den)
    z = ExactValue.sqrt_of(r)
    try:
        lo, hi = faithful_bracket(z, fmt)
    except OutOfRangeError:
        return
    c1, c2 = _val(lo), _val(hi)
    assert c1 * c1 <= r <= c2 * c2
    want = oracles.round_enum(fmt.name, 0, r, True, "rne")
    assert round_reference(z, fmt, "rne").bits == want
