"""Batched evaluation of approximate operations over operand arrays.

The compiled extension is used when it was built; otherwise a numpy
implementation with identical results is selected at import time. Set
``LNSFP8_FORCE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from ..approx import ApproxSpec, RangeFlag
from ..errors import UnsupportedModeError
from ..exact import OpKind
from . import _fallback

__all__ = ["BACKEND", "OP_CODES", "FLAG_NAMES", "apply_batch", "carry_table", "run", "python_apply_batch"]

OP_CODES = {
    OpKind.MUL: 0,
    OpKind.SQUARE: 1,
    OpKind.DIV: 2,
    OpKind.RECIP: 3,
    OpKind.SQRT: 4,
    OpKind.RSQRT: 5,
}
FLAG_NAMES = {
    0: RangeFlag.IN_RANGE.value,
    1: RangeFlag.OVERFLOW.value,
    2: RangeFlag.UNDERFLOW.value,
    3: "invalid",
}

python_apply_batch = _fallback.apply_batch

if os.environ.get("LNSFP8_FORCE_PYTHON"):
    apply_batch, BACKEND = python_apply_batch, "python"
else:
    try:
        from ._kernels import apply_batch  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        apply_batch, BACKEND = python_apply_batch, "python"


@lru_cache(maxsize=64)
def carry_table(spec: ApproxSpec) -> np.ndarray:
    """Carry-in for every (x, y) pattern pair, indexed ``(x << 8) | y``.

    Entries for non-normal operands are meaningless; the kernel flags
    those operands before reading the table.
    """
    if not spec.supported:
        raise UnsupportedModeError(f"{spec.format.name} {spec.op.symbol} {spec.mode.label} has no carry rule")
    lut = np.zeros(65536, dtype=np.uint8)
    rule = spec.carry_rule
    if rule is None:
        return lut
    binary = spec.op.is_binary
    for x in range(256):
        ys = range(256) if binary else (0,)
        for y in ys:
            if binary:
                sr = (x ^ y) >> 7
            else:
                sr = x >> 7 if spec.op is OpKind.RECIP else 0
            lut[(x << 8) | y] = rule(x, y, sr)
    lut.setflags(write=False)
    return lut


def run(spec: ApproxSpec, x, y=None, *, backend=None) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``spec`` over arrays of patterns; returns ``(results, flags)``."""
    fn = backend or apply_batch
    x = np.ascontiguousarray(x, dtype=np.uint8)
    y = np.zeros_like(x) if y is None else np.ascontiguousarray(y, dtype=np.uint8)
    out = np.empty_like(x)
    flags = np.empty_like(x)
    fn(x, y, OP_CODES[spec.op], spec.format.mantissa_bits, spec.constant, carry_table(spec), out, flags)
    return out, flags
