"""Reference oracles that share no code with the library.

Values are decoded straight from bit fields, rounding is done by
searching a sorted list of every representable value on an extended
exponent range, and range exclusions are predicted from float thresholds.
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from functools import lru_cache

FORMAT_FIELDS = {"E5M2": (5, 2), "E4M3": (4, 3)}
IEEE = ("rne", "rna", "rnz", "ru", "rd", "rz")


def fields(name):
    eb, mb = FORMAT_FIELDS[name]
    return eb, mb, (1 << (eb - 1)) - 1


def is_normal(name, b):
    eb, mb, _ = fields(name)
    e = (b >> mb) & ((1 << eb) - 1)
    return 0 < e < (1 << eb) - 1


@lru_cache(maxsize=None)
def value(name, b) -> Fraction:
    eb, mb, bias = fields(name)
    e = (b >> mb) & ((1 << eb) - 1)
    m = b & ((1 << mb) - 1)
    v = Fraction((1 << mb) + m, 1 << mb) * Fraction(2) ** (e - bias)
    return -v if b & 0x80 else v


@lru_cache(maxsize=None)
def grid(name):
    """Positive values (significand, exponent) on a wide exponent range, ascending."""
    eb, mb, bias = fields(name)
    emin, emax = 1 - bias, (1 << eb) - 2 - bias
    pts = []
    for e in range(emin - 40, emax + 40):
        for m in range(1 << mb):
            pts.append(((1 << mb) + m, e, Fraction((1 << mb) + m, 1 << mb) * Fraction(2) ** e))
    return pts, [p[2] for p in pts], [p[2] * p[2] for p in pts], emin, emax, mb, bias


def exact(name, op, x, y=None):
    """(sign, q, is_sqrt): the result is sign * q, or sign * sqrt(q) when is_sqrt."""
    vx = value(name, x)
    vy = value(name, y) if y is not None else None
    if op == "mul":
        r = vx * vy
    elif op == "square":
        r = vx * vx
    elif op == "div":
        r = vx / vy
    elif op == "recip":
        r = 1 / vx
    elif op == "sqrt":
        return 0, vx, True
    elif op == "rsqrt":
        return 0, 1 / vx, True
    else:
        raise ValueError(op)
    return (1 if r < 0 else 0), abs(r), False


def _bracket(name, q, is_sqrt):
    pts, vals, sq, *_ = grid(name)
    keys = sq if is_sqrt else vals
    i = bisect.bisect_left(keys, q)
    if i < len(keys) and keys[i] == q:
        return i, i, 0
    lo, hi = i - 1, i
    # compare q with the midpoint (or its square) between the neighbors
    mid = (vals[lo] + vals[hi]) / 2
    target = mid * mid if is_sqrt else mid
    return lo, hi, (q > target) - (q < target)


@lru_cache(maxsize=1 << 16)
def round_enum(name, sign, q, is_sqrt, mode):
    """Rounded pattern, or "overflow"/"underflow"."""
    pts, vals, sq, emin, emax, mb, bias = grid(name)
    lo, hi, side = _bracket(name, q, is_sqrt)
    if lo == hi:
        idx = lo
    else:
        up_mag = {"ru": not sign, "rd": bool(sign), "rz": False}.get(mode)
        if up_mag is None:
            if side > 0:
                up_mag = True
            elif side < 0:
                up_mag = False
            elif mode == "rna":
                up_mag = True
            elif mode == "rnz":
                up_mag = False
            else:
                up_mag = pts[hi][0] % 2 == 0
        idx = hi if up_mag else lo
    sig, e, _ = pts[idx]
    if e < emin:
        return "underflow"
    if e > emax:
        return "overflow"
    return (sign << 7) | ((e + bias) << mb) | (sig - (1 << mb))


def float_exclusion(name, op, x, y, mode):
    """Out-of-range direction predicted from float thresholds, or None."""
    eb, mb, bias = fields(name)
    emin, emax = 1 - bias, (1 << eb) - 2 - bias
    fx = float(value(name, x))
    fy = float(value(name, y)) if y is not None else None
    z = {
        "mul": lambda: fx * fy,
        "square": lambda: fx * fx,
        "div": lambda: fx / fy,
        "recip": lambda: 1.0 / fx,
        "sqrt": lambda: math.sqrt(fx),
        "rsqrt": lambda: 1.0 / math.sqrt(fx),
    }[op]()
    a, neg = abs(z), z < 0
    top = 2.0 ** (emax + 1)
    maxn = top - 2.0 ** (emax - mb)
    minn = 2.0 ** emin
    below = minn - 2.0 ** (emin - 1 - mb)  # largest value of the binade under minn
    up = {"ru": not neg, "rd": neg, "rz": False}.get(mode)
    if up is not None:
        if a > maxn and (up or a >= top):
            return "overflow"
        if a < minn and not (up and a > below):
            return "underflow"
        return None
    # nearest modes: the tie at maxn + half ulp rounds to an even significand (the power of two)
    half_over = maxn + 2.0 ** (emax - mb - 1)
    if a > half_over or (a == half_over and mode != "rnz"):
        return "overflow"
    half_under = minn - 2.0 ** (emin - mb - 2)
    if a < half_under or (a == half_under and mode == "rnz"):
        return "underflow"
    return None
