# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch evaluation of the approximate FP8 operations."""

from libc.stdint cimport uint8_t

ctypedef const uint8_t[::1] u8_in
ctypedef uint8_t[::1] u8_out

cdef enum:
    FLAG_OK = 0
    FLAG_OVERFLOW = 1
    FLAG_UNDERFLOW = 2
    FLAG_INVALID = 3


cdef inline bint _normal(int b, int mbits, int emax_field) nogil:
    cdef int e = (b & 0x7F) >> mbits
    return 0 < e < emax_field


def apply_batch(u8_in x, u8_in y, int op_code, int mbits, int constant,
                u8_in carry_lut, u8_out out, u8_out flags):
    """Evaluate one cell over paired operand arrays.

    ``carry_lut[(x << 8) | y]`` holds the carry-in; unary ops ignore ``y``.
    """
    cdef Py_ssize_t n = x.shape[0], i
    cdef int ebits = 7 - mbits
    cdef int emax_field = (1 << ebits) - 1
    cdef int lo = 1 << mbits
    cdef int hi = (emax_field << mbits) - 1
    cdef int k = constant - 0x100 if constant & 0x80 else constant
    cdef bint binary = op_code == 0 or op_code == 2
    cdef int a, b, xm, ym, v, sr
    if y.shape[0] != n or out.shape[0] != n or flags.shape[0] != n:
        raise ValueError("operand and output arrays must have equal length")
    if carry_lut.shape[0] != 65536:
        raise ValueError("carry table must have 65536 entries")
    with nogil:
        for i in range(n):
            a = x[i]
            b = y[i] if binary else 0
            if not _normal(a, mbits, emax_field) or (binary and not _normal(b, mbits, emax_field)):
                out[i] = 0
                flags[i] = FLAG_INVALID
                continue
            xm = a & 0x7F
            ym = b & 0x7F
            if op_code == 0:
                v = xm + ym + k
                sr = (a ^ b) >> 7
            elif op_code == 1:
                v = (xm << 1) + k
                sr = 0
            elif op_code == 2:
                v = xm - ym + k
                sr = (a ^ b) >> 7
            elif op_code == 3:
                v = k - xm
                sr = a >> 7
            else:
                if a & 0x80:
                    out[i] = 0
                    flags[i] = FLAG_INVALID
                    continue
                sr = 0
                if op_code == 4:
                    v = (xm >> 1) + k
                else:
                    v = ((-xm) >> 1) + k
            v += carry_lut[(a << 8) | b]
            out[i] = (sr << 7) | (v & 0x7F)
            if v < lo:
                flags[i] = FLAG_UNDERFLOW
            elif v > hi:
                flags[i] = FLAG_OVERFLOW
            else:
                flags[i] = FLAG_OK
