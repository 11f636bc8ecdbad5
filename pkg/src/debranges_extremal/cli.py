"""Command-line interface.

Subcommands:

    optimal   closed-form optimal value (optionally checked by quadrature)
    sample    tabulate a function on a uniform grid as CSV or JSON
    verify    run a verification suite and print a JSON report
    sweep     closed-form values over a range of a

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from typing import Callable, Dict, List, Optional

import numpy as np

from . import extremal as ex
from . import hb
from .report import ReportEntry, VerificationReport
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

FUNCS = (
    "E", "A", "B", "K-diag", "weight", "g", "g1", "g2", "h",
    "M-plus", "M-minus", "T-plus", "T-minus", "S-plus", "S-minus",
)


def decimal(text: str) -> float:
    """argparse type accepting plain decimal literals only."""
    if not _DECIMAL.match(text.strip()):
        raise argparse.ArgumentTypeError(f"not a plain decimal number: {text!r}")
    return float(text)


def positive(text: str) -> float:
    v = decimal(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def tol_override(text: str):
    name, sep, val = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError("expected NAME=VALUE")
    return name.strip(), positive(val)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="debranges-extremal", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    op = sub.add_parser("optimal", help="Closed-form optimal value.")
    op.add_argument("--a", type=positive, required=True, help="Vanishing height a > 0.")
    op.add_argument("--kind", choices=("heaviside", "de-branges"), default="heaviside")
    op.add_argument("--delta", type=positive, default=1.0, help="Scaling delta > 0.")
    op.add_argument("--verify", type=positive, default=None, metavar="X", help="Also integrate the gap over [-X, X].")

    sp = sub.add_parser("sample", help="Tabulate a function.")
    sp.add_argument("--func", choices=FUNCS, required=True)
    sp.add_argument("--a", type=positive, required=True)
    sp.add_argument("--delta", type=positive, default=1.0, help="Scaling for T/S functions.")
    sp.add_argument("--from", dest="x_from", type=decimal, required=True)
    sp.add_argument("--to", dest="x_to", type=decimal, required=True)
    sp.add_argument("--step", type=positive, required=True)
    sp.add_argument("--out", default="-", help="Output path, '-' for stdout.")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    vp = sub.add_parser("verify", help="Run a verification suite.")
    vp.add_argument("--a", type=positive, required=True)
    vp.add_argument("--suite", choices=SUITES, default="all")
    vp.add_argument("--X", type=positive, default=500.0, help="Truncation for optimal-value quadrature.")
    vp.add_argument("--delta", type=positive, default=1.0)
    vp.add_argument("--tol", type=tol_override, action="append", default=[], metavar="NAME=VALUE")

    wp = sub.add_parser("sweep", help="Closed-form values over a range of a.")
    wp.add_argument("--a-min", type=positive, required=True)
    wp.add_argument("--a-max", type=positive, required=True)
    wp.add_argument("--steps", type=int, required=True)
    return ap


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def cmd_optimal(args, out) -> int:
    kind = args.kind.replace("-", "_")
    if kind == "de_branges" and args.delta != 1.0:
        raise _Usage("--kind de-branges requires --delta 1")
    cf = ex.closed_form_value(args.a, kind, args.delta)
    out.write(_fmt(cf) + "\n")
    if args.verify is None:
        return EXIT_OK
    if args.verify < 50:
        raise _Usage("--verify X needs X >= 50")
    P = ex.cached_extremal(args.a).with_kind(kind).with_delta(args.delta)
    ent = ex.optimal_value_check(P, args.verify)
    rep = VerificationReport([ent], {"a": args.a, "kind": kind, "delta": args.delta})
    out.write(rep.to_json(sort_keys=True) + "\n")
    return EXIT_OK if rep.overall_pass else EXIT_FAIL


def _sampler(func: str, a: float, delta: float) -> Callable[[np.ndarray], np.ndarray]:
    p = hb.HBParams(a)
    direct = {
        "E": lambda x: np.abs(hb.eval_E(p, x)),
        "A": lambda x: np.real(hb.eval_A(p, x)),
        "B": lambda x: np.real(hb.eval_B(p, x)),
        "K-diag": lambda x: hb.kernel_diag(p, x),
        "weight": lambda x: hb.weight(p, x),
    }
    if func in direct:
        return direct[func]
    P = ex.cached_extremal(a)
    if func in ("g", "g1", "g2"):
        return P.G.table(("g", "g1", "g2").index(func))
    if func == "h":
        return P.H.h
    if func == "M-plus":
        return P.plus.real
    if func == "M-minus":
        return P.minus.real
    kind = "de_branges" if func.startswith("T") else "heaviside"
    pair = P.with_kind(kind).with_delta(delta)
    sign = "+" if func.endswith("plus") else "-"
    return lambda x: ex.eval_pair_real(pair, sign, x)


def sample_grid(x_from: float, x_to: float, step: float) -> np.ndarray:
    if not x_from < x_to:
        raise _Usage("--from must be smaller than --to")
    n = int(math.floor((x_to - x_from) / step + 1e-9)) + 1
    return x_from + step * np.arange(n)


def cmd_sample(args, out) -> int:
    xs = sample_grid(args.x_from, args.x_to, args.step)
    vals = np.asarray(_sampler(args.func, args.a, args.delta)(xs), dtype=float)
    if args.format == "csv":
        text = "x,value\n" + "".join(f"{_fmt(x)},{_fmt(v)}\n" for x, v in zip(xs, vals))
    else:
        text = json.dumps([{"x": float(x), "value": float(v)} for x, v in zip(xs, vals)]) + "\n"
    if args.out == "-":
        out.write(text)
    else:
        try:
            with open(args.out, "w", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise _IOFailure(str(exc)) from exc
    return EXIT_OK


def cmd_verify(args, out) -> int:
    overrides = dict(args.tol)
    rep = run_suite(args.a, args.suite, args.X, args.delta, overrides)
    out.write(rep.to_json(sort_keys=True) + "\n")
    return EXIT_OK if rep.overall_pass else EXIT_FAIL


def cmd_sweep(args, out) -> int:
    if not args.a_min < args.a_max:
        raise _Usage("--a-min must be smaller than --a-max")
    if args.steps < 2:
        raise _Usage("--steps must be at least 2")
    out.write("a,closed_form_heaviside,K_diag_at_0,product_check\n")
    for a in np.linspace(args.a_min, args.a_max, args.steps):
        cf = ex.closed_form_value(float(a), "heaviside")
        k0 = float(hb.kernel_diag(hb.HBParams(float(a)), 0.0))
        out.write(",".join(_fmt(v) for v in (a, cf, k0, cf * a * a * k0)) + "\n")
    return EXIT_OK


class _Usage(Exception):
    pass


class _IOFailure(Exception):
    pass


COMMANDS = {"optimal": cmd_optimal, "sample": cmd_sample, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except _Usage as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except _IOFailure as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
