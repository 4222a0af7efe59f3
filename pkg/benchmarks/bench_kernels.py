"""Compare the compiled kernel, the numpy fallback, the scalar path and the oracle.

    python benchmarks/bench_kernels.py [--batch N] [--format e5m2|e4m3]
"""

import argparse

from lnsfp8 import kernels
from lnsfp8.approx import get_spec
from lnsfp8.bench import run_bench
from lnsfp8.exact import OpKind, RoundingMode


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=1 << 16)
    ap.add_argument("--format", default="e5m2", choices=["e5m2", "e4m3"])
    ap.add_argument("--oracle-sample", type=int, default=2048)
    args = ap.parse_args()

    print(f"backend selected at import: {kernels.BACKEND}")
    cols = ("kernel", "numpy", "scalar", "oracle")
    print(f"{'cell':<18}" + "".join(f"{c + ' Mop/s':>15}" for c in cols) + f"{'kern/numpy':>12}{'kern/oracle':>13}")
    for op in OpKind:
        for mode in (RoundingMode.RNE, RoundingMode.RZ, RoundingMode.RU):
            if not get_spec(op, args.format, mode).supported:
                continue
            r = run_bench(op, args.format, mode, batch=args.batch, oracle_sample=args.oracle_sample)
            rates = "".join(f"{r.ops_per_s[c] / 1e6:>15.3f}" for c in cols)
            speedup = r.ops_per_s["kernel"] / r.ops_per_s["numpy"]
            agree = "" if r.backends_agree else "  BACKENDS DISAGREE"
            print(f"{op.value + ' ' + mode.value:<18}{rates}{speedup:>12.1f}{r.approx_over_oracle:>13.0f}{agree}")


if __name__ == "__main__":
    main()
