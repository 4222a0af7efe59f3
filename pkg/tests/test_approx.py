import pytest

from lnsfp8 import E4M3, E5M2, Fp8Bits, OpKind, RangeFlag, RoundingMode, approx_apply, carry_in, get_spec
from lnsfp8.approx import from_lns, support_matrix, to_lns, uncorrected_spec
from lnsfp8.errors import DomainError, UnsupportedClassError, UnsupportedModeError
from lnsfp8.formats import normal_patterns

M = RoundingMode
FORMATS = [E5M2, E4M3]


def b5(v):
    return Fp8Bits(v, E5M2)


def b4(v):
    return Fp8Bits(v, E4M3)


def test_lns_round_trip_examples():
    assert to_lns(b5(0x3C)) == 0x00
    assert to_lns(b5(0x40)) == 0x04
    assert to_lns(b4(0x3C)) == 0x04
    assert from_lns(0x00, E5M2) == (b5(0x3C), RangeFlag.IN_RANGE)
    assert from_lns(0x04, E5M2)[0] == b5(0x40)
    assert from_lns(0x04, E4M3)[0] == b4(0x3C)


@pytest.mark.parametrize("fmt", FORMATS, ids=lambda f: f.name)
def test_lns_is_invertible_on_normals(fmt):
    for b in normal_patterns(fmt):
        bits, flag = from_lns(to_lns(Fp8Bits(b, fmt)), fmt)
        assert bits.bits == b and flag is RangeFlag.IN_RANGE


def test_to_lns_rejects_non_normals():
    with pytest.raises(UnsupportedClassError):
        to_lns(b5(0x01))


def test_carry_examples():
    rne = get_spec("mul", "e5m2", "rne")
    assert carry_in(rne, b5(0x3D), b5(0x3E)) == 1
    assert carry_in(rne, b5(0x3E), b5(0x3E)) == 0


def test_e4m3_sqrt_carry_follows_the_oracle():
    # exponent fields 7 (odd) and 8 (even), zero mantissa
    spec = get_spec("sqrt", "e4m3", "rne")
    assert carry_in(spec, b4(0x38)) == 1
    assert carry_in(spec, b4(0x40)) == 0


def test_apply_examples():
    r = approx_apply(get_spec("mul", "e5m2", "rz"), b5(0x3C), b5(0x3C))
    assert r == (b5(0x3C), RangeFlag.IN_RANGE, 0)
    r = approx_apply(get_spec("mul", "e5m2", "rne"), b5(0x3D), b5(0x3E))
    assert r.result == b5(0x40) and r.carry == 1
    raw = approx_apply(uncorrected_spec("mul", "e5m2"), b5(0x3D), b5(0x3E))
    assert raw.result == b5(0x3F)
    r = approx_apply(get_spec("mul", "e5m2", "rne"), b5(0x3E), b5(0x3E))
    assert r.result == b5(0x40) and r.carry == 0


def test_range_flags_and_wraparound():
    spec = get_spec("mul", "e5m2", "rz")
    hi = approx_apply(spec, b5(0x7B), b5(0x7B))
    assert hi.range_flag is RangeFlag.OVERFLOW
    assert hi.result.bits == (0x7B + 0x7B + 0xC4) & 0x7F
    lo = approx_apply(spec, b5(0x04), b5(0x04))
    assert lo.range_flag is RangeFlag.UNDERFLOW


def test_sign_rules():
    assert approx_apply(get_spec("mul", "e5m2", "rz"), b5(0xBC), b5(0x3C)).result.sign == 1
    assert approx_apply(get_spec("div", "e5m2", "rz"), b5(0xBC), b5(0xBC)).result.sign == 0
    assert approx_apply(get_spec("recip", "e5m2", "rz"), b5(0xC0)).result.sign == 1
    assert approx_apply(get_spec("square", "e5m2", "rz"), b5(0xC0)).result.sign == 0


def test_precondition_errors():
    with pytest.raises(DomainError):
        approx_apply(get_spec("sqrt", "e5m2", "rne"), b5(0xC0))
    with pytest.raises(UnsupportedModeError):
        approx_apply(get_spec("sqrt", "e5m2", "rd"), b5(0x40))
    with pytest.raises(TypeError):
        approx_apply(get_spec("mul", "e5m2", "rz"), b5(0x40))
    with pytest.raises(ValueError):
        approx_apply(get_spec("mul", "e5m2", "rz"), b5(0x40), b4(0x40))


def test_support_matrix_examples():
    e5 = support_matrix(E5M2)
    assert not e5[(OpKind.SQRT, M.RD)].supported
    mul_rz = e5[(OpKind.MUL, M.RZ)]
    assert (mul_rz.entry, mul_rz.constant) == ("0", 0xC4)
    div_f = support_matrix(E4M3)[(OpKind.DIV, M.FAITHFUL)]
    assert div_f.entry == "rule F" and div_f.constant == 0x37
    assert e5[(OpKind.RECIP, M.RNE)].printed_constant == 0x87
    assert e5[(OpKind.RECIP, M.RNE)].constant == 0x77


def _cells(ops, modes=None):
    for fmt in FORMATS:
        for op in ops:
            for mode in modes or list(M):
                spec = get_spec(op, fmt, mode)
                if spec.supported and spec.carry_rule is not None:
                    yield pytest.param(spec, id=f"{fmt.name}-{op.value}-{mode.value}")


@pytest.mark.parametrize("spec", list(_cells([OpKind.MUL, OpKind.SQUARE, OpKind.DIV, OpKind.RECIP])))
def test_mantissa_locality(spec):
    fmt = spec.format
    mb = fmt.mantissa_bits
    pats = normal_patterns(fmt)
    keep = 0x80 | fmt.mantissa_mask  # sign and mantissa; exponent forced to the bias
    norm = lambda b: (b & keep) | (fmt.bias << mb)  # noqa: E731
    for x in pats:
        for y in (pats if spec.op.is_binary else [None]):
            bx, by = Fp8Bits(x, fmt), (Fp8Bits(y, fmt) if y is not None else None)
            cx, cy = Fp8Bits(norm(x), fmt), (Fp8Bits(norm(y), fmt) if y is not None else None)
            assert carry_in(spec, bx, by) == carry_in(spec, cx, cy)


@pytest.mark.parametrize("mode", [m for m in M if get_spec("square", "e5m2", m).supported
                                  and get_spec("mul", "e5m2", m).supported])
def test_square_matches_self_multiplication(mode):
    sq, mul = get_spec("square", "e5m2", mode), get_spec("mul", "e5m2", mode)
    for x in normal_patterns(E5M2):
        assert approx_apply(sq, b5(x)) == approx_apply(mul, b5(x), b5(x))


@pytest.mark.parametrize("spec", list(_cells([OpKind.MUL, OpKind.DIV], [M.RNE, M.RNA, M.RNZ, M.RZ]))
                         + [pytest.param(get_spec("mul", "e5m2", "rz"), id="E5M2-mul-rz")])
def test_sign_symmetry(spec):
    fmt = spec.format
    pats = normal_patterns(fmt, positive_only=True)
    for x in pats:
        for y in pats:
            base = approx_apply(spec, Fp8Bits(x, fmt), Fp8Bits(y, fmt))
            for sx, sy in ((0x80, 0), (0, 0x80), (0x80, 0x80)):
                r = approx_apply(spec, Fp8Bits(x | sx, fmt), Fp8Bits(y | sy, fmt))
                assert r.result.magnitude == base.result.magnitude
                assert r.result.sign == (sx ^ sy) >> 7
                assert r.range_flag is base.range_flag
