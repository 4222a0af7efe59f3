"""Command-line front end: ``lnsfp8 {verify,error-map,table,derive,bench}``.

Exit status: 0 success, 1 verification mismatch, 2 usage error or
unsupported cell, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

from .analysis import derive_carry, diff_published, error_map, verify, verify_all
from .approx import get_spec
from .carry import CellKind, published_rows
from .errors import UnsupportedModeError
from .exact import OpKind, RoundingMode
from .formats import FORMATS, get_format

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_OPS = [op.value for op in OpKind]
_MODES = [m.value for m in RoundingMode]


class _UsageError(Exception):
    pass


def _hex_byte(text: str) -> int:
    try:
        v = int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a hex byte") from None
    if not 0 <= v <= 0xFF:
        raise argparse.ArgumentTypeError(f"{text!r} does not fit in 8 bits")
    return v


def _formats(args) -> list[str]:
    return [args.format] if args.format else list(FORMATS)


def _require_supported(op: str, fmt: str, mode: str) -> None:
    spec = get_spec(op, fmt, mode)
    if not spec.supported:
        raise _UsageError(
            f"{spec.format.name} {spec.op.symbol} {spec.mode.label}: unsupported per support matrix "
            f"(dash in the {spec.format.name} table)"
        )


@contextmanager
def _sink(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def _dump_json(obj, path: str | None) -> None:
    with _sink(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    if args.all:
        if args.op or args.mode or args.constant is not None:
            raise _UsageError("--all cannot be combined with --op/--mode/--constant")
        reports = [r for f in _formats(args) for r in verify_all(f)]
    else:
        if not (args.op and args.mode):
            raise _UsageError("verify needs --op and --mode, or --all")
        reports = []
        for f in _formats(args):
            _require_supported(args.op, f, args.mode)
            reports.append(verify(args.op, f, args.mode, constant=args.constant))
    passed = all(r.passed for r in reports)
    doc = {
        "passed": passed,
        "cells": len(reports),
        "mismatches": sum(r.mismatches for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    _dump_json(doc, args.output)
    for r in reports:
        if not r.passed:
            print(f"MISMATCH {r.format} {r.op} {r.mode}: {r.mismatches} case(s)", file=sys.stderr)
    return EXIT_OK if passed else EXIT_MISMATCH


def cmd_error_map(args) -> int:
    if args.carry:
        if args.ref == "exact":
            raise _UsageError("--carry needs a rounding-mode reference (--ref rne, ...)")
        _require_supported(args.op, args.format, args.ref)
    emap = error_map(
        args.op, args.format, args.ref,
        use_carry=args.carry, constant=args.constant, collapse=not args.full,
    )
    with _sink(args.output) as fh:
        fh.write(emap.to_csv())
    return EXIT_OK


_TABLE_MODES = list(RoundingMode)


def render_table(fmt_name: str) -> str:
    """Text rendering of one format's support matrix.

    Entries follow the published table. A trailing ``*`` marks an entry
    whose executed form differs from the printed one; the notes block says how.
    """
    fmt = get_format(fmt_name)
    header = "op: const | " + " | ".join(m.label for m in _TABLE_MODES)
    lines = [f"{fmt.name} support matrix", header]
    notes = []
    for row in published_rows(fmt):
        const = f"0x{row.printed_constant:02X}"
        if row.printed_constant != row.constant:
            const += "*"
            notes.append(f"{row.op.symbol} constant: {row.constant_note}")
        entries = []
        for mode in _TABLE_MODES:
            cell = row.cells[mode]
            if cell.kind is CellKind.DASH:
                text = "---"
            elif cell.kind is CellKind.ONE:
                text = "constant+1"
            elif cell.kind is CellKind.RULE:
                text = f"rule {cell.rule_id}"
            else:
                text = "0"
            if cell.deviates or (cell.kind is CellKind.ZERO and cell.constant_offset):
                text += "*"
                if cell.deviates:
                    notes.append(f"{row.op.symbol} {mode.label}: {cell.note}; executed as {cell.effective}")
                else:
                    offset = row.constant + cell.constant_offset
                    notes.append(f"{row.op.symbol} {mode.label}: {cell.note}; executed at 0x{offset:02X}")
            entries.append(text)
        lines.append(f"{row.op.symbol}: {const} | " + " | ".join(entries))
    if notes:
        lines.append("notes:")
        lines.extend(f"  * {n}" for n in notes)
    return "\n".join(lines) + "\n"


def cmd_table(args) -> int:
    text = "\n".join(render_table(f) for f in _formats(args))
    with _sink(args.output) as fh:
        fh.write(text)
    return EXIT_OK


def cmd_derive(args) -> int:
    if RoundingMode.parse(args.mode) is RoundingMode.FAITHFUL:
        raise _UsageError("derive needs an IEEE rounding mode")
    table = derive_carry(args.op, args.format, args.mode, args.constant)
    doc = table.to_dict()
    if args.diff:
        _require_supported(args.op, args.format, args.mode)
        try:
            doc["diff"] = diff_published(args.op, args.format, args.mode).to_dict()
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
    _dump_json(doc, args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import run_bench

    _require_supported(args.op, args.format, args.mode)
    res = run_bench(
        args.op, args.format, args.mode,
        batch=args.batch, oracle_sample=args.oracle_sample, seed=args.seed,
    )
    _dump_json(res.to_dict(), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lnsfp8", description="Approximate FP8 arithmetic: verification and analysis tools.")
    sub = p.add_subparsers(dest="command", required=True)  # argparse exits 2 on bad usage

    def common(sp, *, op=True, mode=True, fmt_required=False):
        if op:
            sp.add_argument("--op", choices=_OPS, required=op == "required")
        if mode:
            sp.add_argument("--mode", choices=_MODES, required=mode == "required")
        sp.add_argument("--format", choices=list(FORMATS), required=fmt_required)
        sp.add_argument("--output", "-o", help="output file (default: stdout)")

    v = sub.add_parser("verify", help="exhaustively check cells against the oracle (JSON report)")
    common(v)
    v.add_argument("--all", action="store_true", help="every supported cell")
    v.add_argument("--constant", type=_hex_byte, help="override the constant (hex)")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("error-map", help="signed ulp error grid as CSV")
    common(e, op="required", mode=False, fmt_required=True)
    e.add_argument("--ref", default="exact", choices=["exact"] + [m.value for m in RoundingMode if m.is_ieee])
    e.add_argument("--carry", action=argparse.BooleanOptionalAction, default=False,
                   help="apply the reference mode's carry rule")
    e.add_argument("--constant", type=_hex_byte, help="override the constant (hex)")
    e.add_argument("--full", action="store_true", help="every normal pattern instead of one per mantissa")
    e.set_defaults(func=cmd_error_map)

    t = sub.add_parser("table", help="print the support matrix")
    common(t, op=False, mode=False)
    t.set_defaults(func=cmd_table)

    d = sub.add_parser("derive", help="derive the required carry-in truth table (JSON)")
    common(d, op="required", mode="required", fmt_required=True)
    d.add_argument("--constant", type=_hex_byte, help="constant to derive against (hex)")
    d.add_argument("--diff", action="store_true", help="also diff against the printed expression")
    d.set_defaults(func=cmd_derive)

    b = sub.add_parser("bench", help="throughput of the approximate path against the oracle (JSON)")
    common(b, op="required", mode="required", fmt_required=True)
    b.add_argument("--batch", type=int, default=1 << 16)
    b.add_argument("--oracle-sample", type=int, default=4096)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (_UsageError, UnsupportedModeError) as exc:
        print(f"lnsfp8 {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"lnsfp8 {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
