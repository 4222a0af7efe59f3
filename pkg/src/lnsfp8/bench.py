"""Software throughput of the approximate path against the exact oracle.

Numbers are wall-clock rates for this process only; they say nothing
about hardware cost.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .approx import approx_apply, get_spec
from .errors import OutOfRangeError, UnsupportedModeError
from .exact import OpKind, RoundingMode, exact_op, faithful_bracket, round_reference
from .formats import Fp8Bits, Fp8Format, get_format, normal_patterns

__all__ = ["BenchResult", "make_operands", "run_bench"]


@dataclass
class BenchResult:
    op: str
    format: str
    mode: str
    backend: str
    batch: int
    oracle_sample: int
    ops_per_s: dict[str, float] = field(default_factory=dict)
    seconds: dict[str, float] = field(default_factory=dict)
    checksums: dict[str, str] = field(default_factory=dict)
    backends_agree: bool = True
    approx_over_oracle: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def make_operands(op: OpKind, fmt: Fp8Format, n: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """``n`` pseudo-random normal operand pairs, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    pool = np.array(normal_patterns(fmt, positive_only=op.is_root), dtype=np.uint8)
    x = rng.choice(pool, size=n)
    y = rng.choice(pool, size=n) if op.is_binary else np.zeros(n, dtype=np.uint8)
    return x, y


def _digest(out: np.ndarray, flags: np.ndarray) -> str:
    return hashlib.sha256(out.tobytes() + flags.tobytes()).hexdigest()


def _best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def _oracle_one(op: OpKind, fmt: Fp8Format, mode: RoundingMode, x: int, y: int | None) -> int:
    z = exact_op(op, Fp8Bits(x, fmt), Fp8Bits(y, fmt) if y is not None else None)
    try:
        if mode is RoundingMode.FAITHFUL:
            return faithful_bracket(z, fmt)[0].bits
        return round_reference(z, fmt, mode).bits
    except OutOfRangeError:
        return -1


def run_bench(
    op: OpKind | str,
    fmt: Fp8Format | str,
    mode: RoundingMode | str,
    *,
    batch: int = 1 << 16,
    oracle_sample: int = 4096,
    repeats: int = 5,
    seed: int = 0,
) -> BenchResult:
    op, fmt, mode = OpKind.parse(op), get_format(fmt), RoundingMode.parse(mode)
    spec = get_spec(op, fmt, mode)
    if not spec.supported:
        raise UnsupportedModeError(f"{fmt.name} {op.symbol} {mode.label}: unsupported per support matrix")
    x, y = make_operands(op, fmt, batch, seed)
    kernels.carry_table(spec)  # build outside the timed region

    res = BenchResult(op.value, fmt.name, mode.value, kernels.BACKEND, batch, min(oracle_sample, batch))
    outputs = {}
    backends = {"kernel": kernels.apply_batch, "numpy": kernels.python_apply_batch}
    for name, fn in backends.items():
        outputs[name] = kernels.run(spec, x, y, backend=fn)
        secs = _best_of(lambda fn=fn: kernels.run(spec, x, y, backend=fn), repeats)
        res.seconds[name] = secs
        res.ops_per_s[name] = batch / secs
        res.checksums[name] = _digest(*outputs[name])
    res.backends_agree = len(set(res.checksums.values())) == 1

    m = res.oracle_sample
    xs = [int(v) for v in x[:m]]
    ys = [int(v) for v in y[:m]] if op.is_binary else [None] * m
    pairs = [(Fp8Bits(a, fmt), Fp8Bits(b, fmt) if b is not None else None) for a, b in zip(xs, ys)]

    t = time.perf_counter()
    for a, b in pairs:
        approx_apply(spec, a, b)
    res.seconds["scalar"] = time.perf_counter() - t
    res.ops_per_s["scalar"] = m / res.seconds["scalar"]

    t = time.perf_counter()
    refs = [_oracle_one(op, fmt, mode, a, b) for a, b in zip(xs, ys)]
    res.seconds["oracle"] = time.perf_counter() - t
    res.ops_per_s["oracle"] = m / res.seconds["oracle"]
    res.checksums["oracle"] = hashlib.sha256(np.array(refs, dtype=np.int16).tobytes()).hexdigest()

    res.approx_over_oracle = res.ops_per_s["kernel"] / res.ops_per_s["oracle"]
    return res
