import pytest

from lnsfp8 import E4M3, E5M2, BoolExpr, OpKind, RoundingMode
from lnsfp8.carry import CellKind, published_row, published_rows

M = RoundingMode


def test_parser_precedence_and_literals():
    e = BoolExpr("x0 y1 ~x1 ~y0 + x1 y0 ~x0 ~y1")
    assert e.variables == ("x0", "x1", "y0", "y1")
    assert e(0b01, 0b10) == 1
    assert e(0b10, 0b10) == 0
    assert BoolExpr("~sr (x0 + x1)(y0 + y1)")(1, 1, 0) == 1
    assert BoolExpr("~sr (x0 + x1)(y0 + y1)")(1, 1, 1) == 0
    assert BoolExpr("~~x0")(1) == 1
    assert BoolExpr("0")(0xFF, 0xFF, 1) == 0 and BoolExpr("1")(0) == 1


def test_xnor_and_high_bits():
    e = BoolExpr("xnor(x2, y2)")
    assert [e(x << 2, y << 2) for x in (0, 1) for y in (0, 1)] == [1, 0, 0, 1]
    assert BoolExpr("x7")(0x80) == 1 and BoolExpr("x3")(0x08) == 1


@pytest.mark.parametrize("bad", ["", "x0 +", "(x0", "x8", "x0)", "xnor(x0)", "a1"])
def test_parser_rejects_malformed(bad):
    with pytest.raises(ValueError):
        BoolExpr(bad)


def test_equality_is_functional():
    a, b = BoolExpr("x0 + ~x0 x1"), BoolExpr("x0 + x1")
    assert a == b and hash(a) == hash(b)
    assert BoolExpr("x0 + x1 ~x1") == BoolExpr("x0")
    assert hash(BoolExpr("x0 + x1 ~x1")) == hash(BoolExpr("x0"))
    assert BoolExpr("x0") != BoolExpr("x1")


def test_truth_table_and_minterms():
    e = BoolExpr("x0 x1 + ~x0 ~x1")
    assert e.truth_table() == {(0, 0): 1, (0, 1): 0, (1, 0): 0, (1, 1): 1}
    assert e.minterms() == [{"x0": 0, "x1": 0}, {"x0": 1, "x1": 1}]


_DASHES = {
    "E5M2": {(OpKind.SQRT, M.RD), (OpKind.SQRT, M.RZ), (OpKind.RSQRT, M.RD), (OpKind.RSQRT, M.RZ)},
    "E4M3": {
        (OpKind.MUL, M.RU), (OpKind.MUL, M.RD),
        (OpKind.DIV, M.RU), (OpKind.DIV, M.RD), (OpKind.DIV, M.RZ),
        (OpKind.RECIP, M.RU), (OpKind.RECIP, M.RD), (OpKind.RECIP, M.RZ),
        (OpKind.SQUARE, M.RU), (OpKind.SQRT, M.RU), (OpKind.RSQRT, M.RU),
    },
}
_CONSTANTS = {
    "E5M2": [0xC4, 0xC4, 0x3B, 0x87, 0x1E, 0x5A],
    "E4M3": [0xC8, 0xC8, 0x37, 0x6F, 0x1B, 0x53],
}


@pytest.mark.parametrize("fmt", [E5M2, E4M3], ids=lambda f: f.name)
def test_table_shape(fmt):
    rows = published_rows(fmt)
    assert [r.printed_constant for r in rows] == _CONSTANTS[fmt.name]
    dashes = {(r.op, m) for r in rows for m, c in r.cells.items() if c.kind is CellKind.DASH}
    assert dashes == _DASHES[fmt.name]
    for r in rows:
        assert set(r.cells) == set(RoundingMode)


def test_footnote_cells_fold_the_carry_into_the_constant():
    for op, fmt in ((OpKind.RECIP, E5M2), (OpKind.RSQRT, E4M3)):
        cell = published_row(op, fmt).cells[M.FAITHFUL]
        assert cell.kind is CellKind.ONE and cell.constant_offset == 1


def test_deviating_cells_keep_the_printed_text():
    cell = published_row(OpKind.SQRT, E4M3).cells[M.RNE]
    assert cell.printed == "~x3 + x0 + x1 + x2"
    assert cell.effective == "x3 + x0 + x1 + x2"
    assert cell.deviates
    assert not published_row(OpKind.MUL, E5M2).cells[M.RNE].deviates


def test_e5m2_recip_constant_is_corrected():
    row = published_row(OpKind.RECIP, E5M2)
    assert row.printed_constant == 0x87
    assert row.constant == 2 * E5M2.lns_bias - 1 == 0x77
