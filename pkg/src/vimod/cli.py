"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 domain error, 3 size cap
exceeded, 4 a verification suite failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .errors import DomainError, SizeCapError, TruncationError, ValidationError
from .homology import resolve_t
from .linalg import coefficient_field
from .rho import rho_inequality_scan, rho_rows, rho_table_csv, rho_table_json, rho_value
from .verify import SUITES, Params, run_suite
from .vmod import (Context, PresentedEvaluation, dumps_presentation, free_presentation, load_presentation,
                   point_module, zero_presentation)

EXIT_OK, EXIT_IO, EXIT_DOMAIN, EXIT_CAP, EXIT_FAIL = 0, 1, 2, 3, 4


def _int_tuple(text: str):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _add_context_flags(p, window_default=None):
    p.add_argument("--q", type=int, default=2, help="order of the finite field F_q")
    p.add_argument("--m", type=int, default=1, help="number of VI factors")
    p.add_argument("--coeff", default="Q", help='coefficient field: "Q" or "Fp:<prime>"')
    p.add_argument("--window", type=int, default=window_default, help="largest total degree evaluated")
    p.add_argument("--cap", type=int, default=None, help="size cap for the largest linear-algebra problem")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vimod", description="Exact computations with VI^m-modules over finite fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rho", help="evaluate rho_m(d, r), or tabulate / scan it")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--table", action="store_true", help="rows for all m'<=m, -1<=d'<=d, -1<=r'<=r")
    mode.add_argument("--scan", action="store_true", help="inequality scan over the same grid")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    _add_context_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=_int_tuple, default=None, help="generator degree, e.g. 2 or 1,1")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--imax", type=int, default=2)
    p.add_argument("--count", type=int, default=None, help="number of random instances")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = sub.add_parser("homology", help="t_i, degree and regularity of a presented module")
    p.add_argument("input", help="presentation JSON file")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--imax", type=int, default=2)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--method", choices=("pushforward", "complex"), default="pushforward")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("dims", help="dimension table of a presented module")
    p.add_argument("input", help="presentation JSON file")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="csv")

    p = sub.add_parser("example", help="write a standard presentation as JSON")
    p.add_argument("kind", choices=("point", "free", "zero"))
    _add_context_flags(p, window_default=4)
    p.add_argument("--n", type=_int_tuple, default=None, help="generator degree for free/zero")
    return parser


# ---------------------------------------------------------------------------

def cmd_rho(args, out):
    if args.table:
        rows = rho_rows(args.m, args.d, args.r)
        out.write(rho_table_csv(rows) if args.format in ("csv", "text") else rho_table_json(rows))
        return EXIT_OK
    if args.scan:
        rep = rho_inequality_scan(args.m, args.d, args.r)
        if args.format == "json":
            out.write(json.dumps(rep.to_dict(), indent=2) + "\n")
        elif args.format == "csv":
            out.write(_csv(("m", "d", "r", "check", "value"),
                           [(v["m"], v["d"], v["r"], v["check"], v.get("value", v.get("rho")))
                            for v in rep.violations]))
        else:
            out.write(f"checked {rep.checked} grid points ({rep.exact} exact, {rep.bounded} lower bounds): "
                      f"{len(rep.violations)} violation(s); memoized and plain evaluators "
                      f"{'agree' if rep.memo_agrees else 'DISAGREE'}\n")
        return EXIT_OK if rep.ok else EXIT_FAIL
    v = rho_value(args.m, args.d, args.r)
    if args.format == "json":
        out.write(json.dumps({"m": args.m, "d": args.d, "r": args.r, "rho": v.value, "exact": v.exact}) + "\n")
    elif args.format == "csv":
        out.write(_csv(("m", "d", "r", "rho"), [(args.m, args.d, args.r, str(v))]))
    else:
        out.write(f"{v}\n")
    return EXIT_OK


def cmd_verify(args, out):
    params = Params(q=args.q, m=args.m, coeff=args.coeff, window=args.window, seed=args.seed, n=args.n,
                    d=args.d, r=args.r, imax=args.imax, count=args.count)
    if args.cap is not None:
        params.cap = args.cap
    rep = run_suite(args.suite, params)
    if args.format == "json":
        out.write(rep.to_json())
    elif args.format == "csv":
        out.write(_csv(("suite", "prng", "seed", "status", "checks", "instances", "counterexamples",
                        "control_failed_as_designed"),
                       [(rep.suite, "MT19937", rep.seed, "PASS" if rep.passed else "FAIL", rep.checks,
                         rep.instances, len(rep.counterexamples), rep.control.get("failed_as_designed"))]))
    else:
        out.write(f"# prng MT19937, seed {rep.seed}\n{rep.summary()}\n")
        for c in rep.counterexamples[:10]:
            out.write(f"  counterexample: {json.dumps(c, sort_keys=True)}\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _load(args):
    ctx, pres = load_presentation(args.input)
    if args.window is not None:
        ctx = ctx.with_window(args.window)
    return ctx, pres


def cmd_homology(args, out):
    ctx, pres = _load(args)
    kw = {"cap": args.cap} if args.cap is not None else {}
    rep = resolve_t(pres, i_max=args.imax, ctx=ctx, method=args.method, **kw)
    if args.format == "json":
        out.write(rep.to_json())
    else:
        rows = [(f"t{i}", rep.t[i]) for i in sorted(rep.t)]
        rows += [("degree", rep.degree), ("reg", rep.reg), ("window", rep.window), ("truncated", rep.truncated)]
        out.write(_csv(("quantity", "value"), rows))
    return EXIT_OK


def cmd_dims(args, out):
    ctx, pres = _load(args)
    V = PresentedEvaluation(ctx, pres, ctx.window)
    table = V.dims()
    if args.format == "json":
        out.write(json.dumps(table.to_json(), indent=2) + "\n")
    else:
        header = tuple(f"a{i}" for i in range(ctx.m)) + ("dim",)
        out.write(_csv(header, [tuple(a) + (d,) for a, d in table.items()]))
    return EXIT_OK


def cmd_example(args, out):
    ctx = Context(args.q, args.m, coefficient_field(args.coeff), args.window)
    n = args.n if args.n is not None else (1,) * args.m
    if len(n) != args.m:
        raise DomainError(f"--n needs {args.m} entries")
    if args.kind == "point":
        pres = point_module(args.q, args.m)
    elif args.kind == "free":
        pres = free_presentation([n])
    else:
        pres = zero_presentation(n)
    out.write(dumps_presentation(ctx, pres))
    return EXIT_OK


COMMANDS = {"rho": cmd_rho, "verify": cmd_verify, "homology": cmd_homology, "dims": cmd_dims,
            "example": cmd_example}


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except (OSError, ValidationError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_IO
    except SizeCapError as exc:
        err.write(f"size cap exceeded: {exc}\n")
        return EXIT_CAP
    except (DomainError, TruncationError) as exc:
        err.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
