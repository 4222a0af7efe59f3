"""Vectorized numpy implementation of the batch kernel, used when the extension is missing."""

from __future__ import annotations

import numpy as np

FLAG_OK, FLAG_OVERFLOW, FLAG_UNDERFLOW, FLAG_INVALID = 0, 1, 2, 3


def apply_batch(x, y, op_code, mbits, constant, carry_lut, out, flags):
    x = np.asarray(x, dtype=np.uint8)
    y = np.asarray(y, dtype=np.uint8)
    n = x.shape[0]
    if y.shape[0] != n or out.shape[0] != n or flags.shape[0] != n:
        raise ValueError("operand and output arrays must have equal length")
    if carry_lut.shape[0] != 65536:
        raise ValueError("carry table must have 65536 entries")
    emax_field = (1 << (7 - mbits)) - 1
    lo, hi = 1 << mbits, (emax_field << mbits) - 1
    k = constant - 0x100 if constant & 0x80 else constant
    binary = op_code in (0, 2)

    a = x.astype(np.int32)
    b = y.astype(np.int32) if binary else np.zeros_like(a)
    xm, ym = a & 0x7F, b & 0x7F

    def normal(p):
        e = (p & 0x7F) >> mbits
        return (e > 0) & (e < emax_field)

    valid = normal(a)
    if binary:
        valid &= normal(b)
    if op_code == 0:
        v, sr = xm + ym + k, (a ^ b) >> 7
    elif op_code == 1:
        v, sr = (xm << 1) + k, np.zeros_like(a)
    elif op_code == 2:
        v, sr = xm - ym + k, (a ^ b) >> 7
    elif op_code == 3:
        v, sr = k - xm, a >> 7
    else:
        valid &= (a & 0x80) == 0
        sr = np.zeros_like(a)
        # numpy's >> on signed ints is arithmetic, as the rsqrt form needs
        v = ((xm >> 1) if op_code == 4 else ((-xm) >> 1)) + k
    v = v + np.asarray(carry_lut, dtype=np.int32)[(a << 8) | b]

    res = (sr << 7) | (v & 0x7F)
    fl = np.where(v < lo, FLAG_UNDERFLOW, np.where(v > hi, FLAG_OVERFLOW, FLAG_OK))
    out[:] = np.where(valid, res, 0)
    flags[:] = np.where(valid, fl, FLAG_INVALID)
