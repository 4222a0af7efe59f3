"""Carry-in Boolean expressions and the published support tables.

Expressions use a small sum-of-products grammar::

    expr   := term ('+' term)*
    term   := factor+                  (juxtaposition is AND)
    factor := '~' factor | atom
    atom   := VAR | '0' | '1' | '(' expr ')' | 'xnor(' expr ',' expr ')'

``VAR`` is ``x0``..``x7``, ``y0``..``y7`` (bit ``i`` of the operand
pattern, LSB = 0) or ``sr`` (sign of the result).
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Callable

from .exact import OpKind, RoundingMode
from .formats import E4M3, E5M2, Fp8Format

__all__ = [
    "BoolExpr",
    "CellKind",
    "TableCell",
    "TableRow",
    "published_row",
    "published_rows",
]

_TOKEN = re.compile(r"\s*(xnor\(|[xy][0-7]|sr|[01]|[~+(),])")


class BoolExpr:
    """A parsed carry-in expression, executable and tabulable."""

    def __init__(self, text: str):
        self.text = " ".join(text.split())
        self._tokens = self._tokenize(self.text)
        self._pos = 0
        tree = self._expr()
        if self._pos != len(self._tokens):
            raise ValueError(f"trailing input in expression {text!r}")
        del self._tokens
        self.variables: tuple[str, ...] = tuple(sorted(_collect(tree), key=_var_order))
        src = _compile(tree)
        self._fn: Callable[[int, int, int], int] = eval(f"lambda x, y, sr: {src}", {})

    @staticmethod
    def _tokenize(text: str) -> list[str]:
        out, pos = [], 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ValueError(f"bad token at {text[pos:]!r}")
            out.append(m.group(1))
            pos = m.end()
        return out

    def _peek(self) -> str | None:
        return self._tokens[self._pos] if self._pos < len(self._tokens) else None

    def _take(self, expected: str | None = None) -> str:
        tok = self._peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"expected {expected or 'token'} in {self.text!r}")
        self._pos += 1
        return tok

    def _expr(self):
        terms = [self._term()]
        while self._peek() == "+":
            self._take("+")
            terms.append(self._term())
        return ("or", terms) if len(terms) > 1 else terms[0]

    def _term(self):
        factors = [self._factor()]
        while self._peek() not in (None, "+", ")", ","):
            factors.append(self._factor())
        return ("and", factors) if len(factors) > 1 else factors[0]

    def _factor(self):
        if self._peek() == "~":
            self._take("~")
            return ("not", self._factor())
        tok = self._take()
        if tok == "(":
            inner = self._expr()
            self._take(")")
            return inner
        if tok == "xnor(":
            a = self._expr()
            self._take(",")
            b = self._expr()
            self._take(")")
            return ("xnor", [a, b])
        if tok in ("0", "1"):
            return ("const", int(tok))
        if tok in ("+", ")", ","):
            raise ValueError(f"unexpected {tok!r} in {self.text!r}")
        return ("var", tok)

    def __call__(self, x: int, y: int = 0, sr: int = 0) -> int:
        return self._fn(x, y, sr)

    def evaluate(self, env: dict[str, int]) -> int:
        """Evaluate with named variable values (missing ones read as 0)."""
        x = sum(env.get(f"x{i}", 0) << i for i in range(8))
        y = sum(env.get(f"y{i}", 0) << i for i in range(8))
        return self._fn(x, y, env.get("sr", 0))

    def truth_table(self) -> dict[tuple[int, ...], int]:
        """Output for every assignment of ``self.variables`` (in that order)."""
        return {
            vals: self.evaluate(dict(zip(self.variables, vals)))
            for vals in itertools.product((0, 1), repeat=len(self.variables))
        }

    def minterms(self) -> list[dict[str, int]]:
        return [dict(zip(self.variables, k)) for k, v in self.truth_table().items() if v]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoolExpr):
            return NotImplemented
        names = tuple(sorted(set(self.variables) | set(other.variables), key=_var_order))
        for vals in itertools.product((0, 1), repeat=len(names)):
            env = dict(zip(names, vals))
            if self.evaluate(env) != other.evaluate(env):
                return False
        return True

    def essential_variables(self) -> tuple[str, ...]:
        """Variables the output actually depends on."""
        table = self.truth_table()
        out = []
        for i, name in enumerate(self.variables):
            if any(v != table[k[:i] + (1 - k[i],) + k[i + 1:]] for k, v in table.items()):
                out.append(name)
        return tuple(out)

    def __hash__(self) -> int:
        # consistent with __eq__: depends only on the function, not the spelling
        names = self.essential_variables()
        return hash((names, tuple(
            self.evaluate(dict(zip(names, vals)))
            for vals in itertools.product((0, 1), repeat=len(names))
        )))

    def __repr__(self) -> str:
        return f"BoolExpr({self.text!r})"

    def __str__(self) -> str:
        return self.text


def _var_order(name: str) -> tuple[int, int]:
    if name == "sr":
        return (0, 0)
    return (1 if name[0] == "x" else 2, int(name[1:]))


def _collect(node) -> set[str]:
    kind, arg = node
    if kind == "var":
        return {arg}
    if kind == "const":
        return set()
    if kind == "not":
        return _collect(arg)
    return set().union(*(_collect(a) for a in arg))


def _compile(node) -> str:
    kind, arg = node
    if kind == "var":
        if arg == "sr":
            return "sr"
        return f"(({arg[0]} >> {arg[1:]}) & 1)"
    if kind == "const":
        return str(arg)
    if kind == "not":
        return f"(1 ^ {_compile(arg)})"
    if kind == "and":
        return "(" + " & ".join(_compile(a) for a in arg) + ")"
    if kind == "or":
        return "(" + " | ".join(_compile(a) for a in arg) + ")"
    a, b = arg
    return f"(1 ^ {_compile(a)} ^ {_compile(b)})"


class CellKind(enum.Enum):
    ZERO = "0"
    ONE = "1"  # unconditional carry, realised as constant + 1
    RULE = "rule"
    DASH = "---"


@dataclass(frozen=True)
class TableCell:
    """One (operation, rounding mode) entry of a published support table.

    ``printed`` is the expression exactly as published. ``effective`` is
    what gets executed; it differs only where the printed form fails the
    exhaustive check. ``constant_offset`` is added to the row constant for
    this cell (``+1`` where an unconditional carry is folded into it).
    """

    kind: CellKind
    rule_id: str | None = None
    printed: str | None = None
    effective: str | None = None
    constant_offset: int = 0
    note: str | None = None

    @property
    def supported(self) -> bool:
        return self.kind is not CellKind.DASH

    @property
    def printed_expr(self) -> BoolExpr | None:
        return _expr(self.printed) if self.printed else None

    @property
    def effective_expr(self) -> BoolExpr | None:
        text = self.effective or self.printed
        return _expr(text) if text else None

    @property
    def deviates(self) -> bool:
        return self.effective is not None and self.effective != self.printed


@dataclass(frozen=True)
class TableRow:
    op: OpKind
    fmt: Fp8Format
    printed_constant: int
    constant: int
    cells: dict[RoundingMode, TableCell] = field(hash=False)
    constant_note: str | None = None

    @property
    def base_constant(self) -> int:
        """Constant of the uncorrected LNS expression (before any decrement)."""
        return _BASE_CONSTANTS[self.fmt.name][self.op]


_EXPR_CACHE: dict[str, BoolExpr] = {}


def _expr(text: str) -> BoolExpr:
    e = _EXPR_CACHE.get(text)
    if e is None:
        e = _EXPR_CACHE[text] = BoolExpr(text)
    return e


M = RoundingMode
_Z = TableCell(CellKind.ZERO)
_D = TableCell(CellKind.DASH)
_B = TableCell(CellKind.ONE, constant_offset=1, note="unconditional carry folded into constant + 1")


def _rule(rule_id: str, printed: str, effective: str | None = None, note: str | None = None) -> TableCell:
    return TableCell(CellKind.RULE, rule_id, printed, effective, 0, note)


# -B, -B, B, 2B, B/2, 3B/2 as 8-bit two's complement
_BASE_CONSTANTS = {
    "E5M2": {
        OpKind.MUL: 0xC4, OpKind.SQUARE: 0xC4, OpKind.DIV: 0x3C,
        OpKind.RECIP: 0x78, OpKind.SQRT: 0x1E, OpKind.RSQRT: 0x5A,
    },
    "E4M3": {
        OpKind.MUL: 0xC8, OpKind.SQUARE: 0xC8, OpKind.DIV: 0x38,
        OpKind.RECIP: 0x70, OpKind.SQRT: 0x1C, OpKind.RSQRT: 0x54,
    },
}

_E5M2_DIV_RZ = "~y0 ~y1 + x0 ~x1 ~y1 + x1 ~x0 ~y0 + x0 x1 y0 y1"
_E5M2_RECIP_RZ = "~x0 ~x1"

_E5M2_ROWS = {
    OpKind.MUL: (0xC4, 0xC4, None, {
        M.RNE: _rule("RNe", "x0 y1 ~x1 ~y0 + x1 y0 ~x0 ~y1"),
        M.RNA: _rule("RNa", "x0 y1 ~x1 ~y0 + x1 y0 ~x0 ~y1 + x1 y1 ~x0 ~y0"),
        M.RNZ: _Z,
        M.RU: _rule("RU", "~sr (x0 + x1)(y0 + y1)"),
        M.RD: _rule("RD", "sr (x0 + x1)(y0 + y1)"),
        M.RZ: _Z,
        M.FAITHFUL: _Z,
    }),
    OpKind.SQUARE: (0xC4, 0xC4, None, {
        M.RNE: _Z,
        M.RNA: _rule("RNa", "x1 ~x0"),
        M.RNZ: _Z,
        M.RU: _rule("RU", "x0 + x1"),
        M.RD: _Z,
        M.RZ: _Z,
        M.FAITHFUL: _Z,
    }),
    OpKind.DIV: (0x3B, 0x3B, None, {
        M.RNE: _rule("RN", "x0 + x1 + y0 y1 + ~y0 ~y1"),
        M.RNA: _rule("RN", "x0 + x1 + y0 y1 + ~y0 ~y1"),
        M.RNZ: _rule("RN", "x0 + x1 + y0 y1 + ~y0 ~y1"),
        M.RU: _rule("RU", "~sr + " + _E5M2_DIV_RZ),
        M.RD: _rule("RD", "sr + " + _E5M2_DIV_RZ),
        M.RZ: _rule("RZ", _E5M2_DIV_RZ),
        M.FAITHFUL: TableCell(
            CellKind.ZERO, constant_offset=1,
            note="faithful only with the undecremented constant 0x3C",
        ),
    }),
    OpKind.RECIP: (0x87, 0x77, "printed 0x87 cannot be 2B-1; executed as 0x77", {
        M.RNE: _rule("RN", "x0 x1 + ~x0 ~x1"),
        M.RNA: _rule("RN", "x0 x1 + ~x0 ~x1"),
        M.RNZ: _rule("RN", "x0 x1 + ~x0 ~x1"),
        M.RU: _rule("RU", "x7 + " + _E5M2_RECIP_RZ, "~x7 + " + _E5M2_RECIP_RZ,
                    "printed sign literal is inverted"),
        M.RD: _rule("RD", "~x7 + " + _E5M2_RECIP_RZ, "x7 + " + _E5M2_RECIP_RZ,
                    "printed sign literal is inverted"),
        M.RZ: _rule("RZ", _E5M2_RECIP_RZ),
        M.FAITHFUL: _B,
    }),
    OpKind.SQRT: (0x1E, 0x1E, None, {
        M.RNE: _Z, M.RNA: _Z, M.RNZ: _Z,
        M.RU: _rule("RU", "x0"),
        M.RD: _D, M.RZ: _D,
        M.FAITHFUL: _Z,
    }),
    OpKind.RSQRT: (0x5A, 0x5A, None, {
        M.RNE: _Z, M.RNA: _Z, M.RNZ: _Z,
        M.RU: _rule("RU", "x0"),
        M.RD: _D, M.RZ: _D,
        M.FAITHFUL: _Z,
    }),
}

_E4M3_MUL_RNE = (
    "x0 y2 ~x2 ~y0 + x0 y2 ~x2 ~y1 + x1 y2 ~x2 ~y0 + x1 y2 ~x2 ~y1 + x2 y0 ~x0 ~y2"
    " + x2 y0 ~x1 ~y2 + x2 y1 ~x0 ~y2 + x2 y1 ~x1 ~y2 + x2 y2 ~x1 ~y1"
    " + x0 x1 y1 ~x2 ~y2 + x1 y0 y1 ~x2 ~y2"
)
_E4M3_MUL_RNA = (
    "x0 y2 ~x1 ~y1 + x0 y2 ~x2 ~y0 + x1 y1 ~x0 ~y2 + x1 y1 ~x2 ~y0 + x1 y1 ~x2 ~y2"
    " + x1 y2 ~x2 ~y1 + x2 y0 ~x0 ~y2 + x2 y0 ~x1 ~y1 + x2 y1 ~x1 ~y2"
    " + x2 y2 ~x0 ~x1 ~y0 + x2 y2 ~x0 ~y0 ~y1"
)
_E4M3_MUL_RNZ = (
    "x1 y2 ~x2 ~y0 + x1 y2 ~x2 ~y1 + x2 y1 ~x0 ~y2 + x2 y1 ~x1 ~y2 + x2 y2 ~x1 ~y1"
    " + x0 x1 y1 ~x2 ~y2 + x0 x2 y0 ~x1 ~y2 + x0 y0 y2 ~x2 ~y1 + x0 y1 y2 ~x2 ~y0"
    " + x1 x2 y0 ~x0 ~y2 + x1 y0 y1 ~x2 ~y2"
)
_E4M3_MUL_RZ = (
    "x1 y2 ~x0 ~x2 ~y1 + x1 y2 ~x2 ~y0 ~y1 + x2 y1 ~x0 ~x1 ~y2 + x2 y1 ~x1 ~y0 ~y2"
    " + x0 x1 y0 y1 ~x2 ~y2 + x2 y2 ~x0 ~x1 ~y0 ~y1"
)
_E4M3_DIV_RN = (
    "x0 x1 ~x2 + x1 ~x2 ~y2 + x2 y1 y2 + x2 ~x0 ~x1 + x2 ~x1 ~y1 + y0 y1 y2"
    " + ~y0 ~y1 ~y2 + x0 ~x1 ~y1 ~y2 + x2 y0 y2 ~x0"
)
_E4M3_RECIP_RN = "x0 x1 x2 + ~x0 ~x1 ~x2"
_E4M3_SQRT_RN = ("~x3 + x0 + x1 + x2", "x3 + x0 + x1 + x2")
_E4M3_SQRT_RD = (
    "x3 x0 + ~x3 (x0 ~x1 + x0 ~x2 + ~x1 ~x2)",
    "~x3 x0 + x3 (x0 ~x1 + x0 ~x2 + ~x1 ~x2)",
)
_X3_NOTE = "printed x3 is the complement of stored exponent bit 3"
_E4M3_RSQRT_RN = "x3 ~x1 ~x2 + ~x3 x1 x2 + x0"
_E4M3_RSQRT_RD = "x3 ~x1 ~x2 + ~x3 x0 x1 x2"

_E4M3_ROWS = {
    OpKind.MUL: (0xC8, 0xC8, None, {
        M.RNE: _rule("RNe", _E4M3_MUL_RNE),
        M.RNA: _rule("RNa", _E4M3_MUL_RNA),
        M.RNZ: _rule("RNz", _E4M3_MUL_RNZ),
        M.RU: _D, M.RD: _D,
        M.RZ: _rule("RZ", _E4M3_MUL_RZ),
        M.FAITHFUL: _rule("F", "(x2 + x1 + x0)(y2 + y1 + y0)"),
    }),
    OpKind.SQUARE: (0xC8, 0xC8, None, {
        M.RNE: _rule("RNe/RNz", "x2 ~x1 + x0 x1 ~x2"),
        M.RNA: _rule("RNa", "x1 ~x2 + x2 ~x1"),
        M.RNZ: _rule("RNe/RNz", "x2 ~x1 + x0 x1 ~x2"),
        M.RU: _D,
        M.RD: _rule("RD/RZ", "x0 x1 ~x2 + x2 ~x0 ~x1"),
        M.RZ: _rule("RD/RZ", "x0 x1 ~x2 + x2 ~x0 ~x1"),
        M.FAITHFUL: _rule("F", "x2 ~x1 ~x0 + ~x2 x1 x0"),
    }),
    OpKind.DIV: (0x37, 0x37, None, {
        M.RNE: _rule("RN", _E4M3_DIV_RN),
        M.RNA: _rule("RN", _E4M3_DIV_RN),
        M.RNZ: _rule("RN", _E4M3_DIV_RN),
        M.RU: _D, M.RD: _D, M.RZ: _D,
        M.FAITHFUL: _rule("F", "~y2 ~y1 ~y0 + xnor(x2, y2) xnor(x1, y1) xnor(x0, y0)"),
    }),
    OpKind.RECIP: (0x6F, 0x6F, None, {
        M.RNE: _rule("RN", _E4M3_RECIP_RN),
        M.RNA: _rule("RN", _E4M3_RECIP_RN),
        M.RNZ: _rule("RN", _E4M3_RECIP_RN),
        M.RU: _D, M.RD: _D, M.RZ: _D,
        M.FAITHFUL: _rule("F", "~x2 ~x1 ~x0"),
    }),
    OpKind.SQRT: (0x1B, 0x1B, None, {
        M.RNE: _rule("RN", *_E4M3_SQRT_RN, _X3_NOTE),
        M.RNA: _rule("RN", *_E4M3_SQRT_RN, _X3_NOTE),
        M.RNZ: _rule("RN", *_E4M3_SQRT_RN, _X3_NOTE),
        M.RU: _D,
        M.RD: _rule("RD/RZ", *_E4M3_SQRT_RD, _X3_NOTE),
        M.RZ: _rule("RD/RZ", *_E4M3_SQRT_RD, _X3_NOTE),
        M.FAITHFUL: TableCell(
            CellKind.ZERO, constant_offset=1,
            note="faithful only with the undecremented constant 0x1C",
        ),
    }),
    OpKind.RSQRT: (0x53, 0x53, None, {
        M.RNE: _rule("RN", _E4M3_RSQRT_RN),
        M.RNA: _rule("RN", _E4M3_RSQRT_RN),
        M.RNZ: _rule("RN", _E4M3_RSQRT_RN),
        M.RU: _D,
        M.RD: _rule("RD/RZ", _E4M3_RSQRT_RD),
        M.RZ: _rule("RD/RZ", _E4M3_RSQRT_RD),
        M.FAITHFUL: _B,
    }),
}

_ROWS: dict[tuple[str, OpKind], TableRow] = {}
for _fmt, _table in ((E5M2, _E5M2_ROWS), (E4M3, _E4M3_ROWS)):
    for _op, (_printed, _const, _note, _cells) in _table.items():
        _ROWS[(_fmt.name, _op)] = TableRow(_op, _fmt, _printed, _const, dict(_cells), _note)


def published_row(op: OpKind, fmt: Fp8Format) -> TableRow:
    try:
        return _ROWS[(fmt.name, op)]
    except KeyError:
        raise ValueError(f"no published expressions for format {fmt.name}") from None


def published_rows(fmt: Fp8Format) -> list[TableRow]:
    return [published_row(op, fmt) for op in OpKind]
