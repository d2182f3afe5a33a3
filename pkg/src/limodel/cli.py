"""Command-line front end: zero cache, eta table, Li coefficients, grids, norms, verification."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import special
from .errors import LiModelError
from .li import LiReport, VerifyConfig, li_verify
from .modelspace import (BasisFunction, F_gamma, G_n, H_n, M_n_truncated, make_context)
from .quad import QuadConfig, norm_Gn
from .stieltjes import eta_from_powerseries, eta_from_vonmangoldt
from .zeros import default_cache_dir, load_or_compute

EXIT_VERDICT_FAIL = 1

EXIT_CODES_HELP = """\
exit codes:
  0   success; for verify and li --method all, every verdict passed
  1   at least one verdict failed (budget arithmetic printed on stderr)
  2   invalid command line
  3   zero cache unreadable or unwritable
  4   quadrature subdivision budget exceeded
  5   tail-fit failure (span too small or fit residual too large)
  6   zero count disagrees with the Riemann-von Mangoldt estimate
  7   argument outside the domain, pole, or point too close to a zero
  8   series accuracy not reached within max_terms
  10  other library error
"""


def parse_n_range(text: str) -> list[int]:
    """'3', '1..5' or '1,2,4'."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad n range {text!r}") from exc
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"n range {text!r} must be non-empty and positive")
    return values


def parse_grid(text: str) -> np.ndarray:
    """'start:stop:step', both ends included."""
    try:
        a, b, h = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}") from exc
    if h <= 0 or b < a:
        raise argparse.ArgumentTypeError("grid needs step > 0 and stop >= start")
    count = int(math.floor((b - a) / h + 1e-9)) + 1
    return a + h * np.arange(count)


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _fmt(x: float) -> str:
    return repr(float(x))


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_zeros(args) -> int:
    table = load_or_compute(args.upto, args.cache_dir, args.recompute)
    sys.stdout.write(table.to_text())
    return 0


def cmd_eta(args) -> int:
    tab = eta_from_powerseries(args.max_k)
    header = ["k", "eta", "err_est"]
    if args.cross_check:
        header += ["eta_primes", "primes_residual"]
    rows = []
    for k in range(args.max_k + 1):
        row = [k, _fmt(tab.eta[k]), _fmt(tab.err_est[k])]
        if args.cross_check:
            if k <= 6:
                v, r = eta_from_vonmangoldt(k)
                row += [_fmt(v), _fmt(r)]
            else:
                row += ["", ""]
        rows.append(row)
    sys.stdout.write(_csv_text(header, rows))
    return 0


def _report_rows(rep: LiReport):
    rows = []
    if rep.lambda_zero_sum is not None:
        rows.append([rep.n, "zeros", _fmt(rep.lambda_zero_sum), _fmt(rep.zero_sum_tail_budget)])
    if rep.lambda_arithmetic is not None:
        rows.append([rep.n, "arith", _fmt(rep.lambda_arithmetic), _fmt(rep.arithmetic_err)])
    if rep.lambda_norm is not None:
        rows.append([rep.n, "norm", _fmt(rep.lambda_norm), _fmt(rep.norm_err_budget)])
    return rows


def _verify_config(args, methods) -> VerifyConfig:
    return VerifyConfig(T=args.T, span=args.span, rel_tol=args.rel_tol, methods=methods,
                        cache_dir=args.cache_dir, recompute=args.recompute)


def _explain_failures(reports) -> bool:
    ok = True
    for rep in reports:
        for v in rep.verdicts:
            if not v.passed:
                ok = False
                print(f"n={rep.n}: {v.explain()}", file=sys.stderr)
    return ok


def cmd_li(args) -> int:
    methods = ("zeros", "arith", "norm") if args.method == "all" else (args.method,)
    rep = li_verify(args.n, _verify_config(args, methods))
    if args.csv:
        sys.stdout.write(_csv_text(["n", "method", "value", "err"], _report_rows(rep)))
    else:
        sys.stdout.write(rep.to_json() + "\n")
    return 0 if _explain_failures([rep]) else EXIT_VERDICT_FAIL


def cmd_eval(args) -> int:
    x = args.grid
    fn = args.fn
    if fn == "Hn":
        vals = H_n(make_context(args.n), x + 1j * args.im)
    elif fn == "Gn":
        vals = G_n(make_context(args.n), x)
    elif fn == "Theta":
        vals = special.Theta_fn(x)
    elif fn == "Fgamma":
        table = load_or_compute(args.T, args.cache_dir, args.recompute)
        if not 1 <= args.index <= len(table):
            raise LiModelError(f"--index must be in 1..{len(table)} for T={args.T:g}")
        vals = F_gamma(BasisFunction.from_table(table, args.index - 1), x)
    else:  # Mn
        table = load_or_compute(args.T, args.cache_dir, args.recompute)
        vals = np.array([M_n_truncated(args.n, table, xv + 1j * args.im)[0] for xv in x])
    vals = np.atleast_1d(np.asarray(vals, dtype=complex))
    rows = [[_fmt(a), _fmt(v.real), _fmt(v.imag)] for a, v in zip(x, vals)]
    if args.json:
        sys.stdout.write(json.dumps({"fn": fn, "n": args.n, "rows": rows}, indent=2) + "\n")
    else:
        sys.stdout.write(_csv_text(["x", "re", "im"], rows))
    return 0


def cmd_norm(args) -> int:
    cfg = QuadConfig(span=args.span, rel_tol=args.rel_tol)
    res = norm_Gn(make_context(args.n), cfg)
    out = {"n": args.n, "span": args.span, "rel_tol": args.rel_tol,
           "lambda": float(np.real(res.total)) / (2 * math.pi), **res.to_dict()}
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return 0


def cmd_verify(args) -> int:
    cfg = _verify_config(args, ("zeros", "arith", "norm"))
    # build shared inputs once so worker threads only read them
    cfg.quad_config()
    cfg.zero_table()
    cfg.eta_table(max(args.n))
    if args.workers > 1:
        with ThreadPoolExecutor(args.workers) as pool:
            reports = list(pool.map(lambda n: li_verify(n, cfg), args.n))
    else:
        reports = [li_verify(n, cfg) for n in args.n]
    sys.stdout.write(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    return 0 if _explain_failures(reports) else EXIT_VERDICT_FAIL


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", type=Path, default=None,
                        help="zero cache directory (default: $LI_CACHE_DIR or the user cache dir)")
    common.add_argument("--recompute", action="store_true", help="ignore and rewrite the zero cache")

    quad = argparse.ArgumentParser(add_help=False)
    quad.add_argument("--span", type=_positive_float, default=500.0, help="quadrature half-width (default 500)")
    quad.add_argument("--rel-tol", type=_positive_float, default=1e-6, help="panel tolerance (default 1e-6)")

    height = argparse.ArgumentParser(add_help=False)
    height.add_argument("--T", type=_positive_float, default=1000.0, help="zero table height (default 1000)")

    p = argparse.ArgumentParser(
        prog="limodel",
        description="Li coefficients by zero sums, the arithmetic formula and the L2 norm of G_n.",
        epilog=EXIT_CODES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("zeros", parents=[common], help="print the zero table up to a height")
    s.add_argument("--upto", type=_positive_float, required=True)
    s.set_defaults(func=cmd_zeros)

    s = sub.add_parser("eta", help="Laurent coefficients eta_k as CSV")
    s.add_argument("--max-k", type=int, required=True)
    s.add_argument("--cross-check", action="store_true", help="add prime-sum estimates for k <= 6")
    s.set_defaults(func=cmd_eta)

    s = sub.add_parser("li", parents=[common, quad, height], help="lambda_n by one or all routes")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--method", choices=["zeros", "arith", "norm", "all"], default="all")
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV rows n,method,value,err")
    s.set_defaults(func=cmd_li)

    s = sub.add_parser("eval", parents=[common, height], help="sample a function on a grid")
    s.add_argument("--fn", choices=["Hn", "Gn", "Mn", "Fgamma", "Theta"], required=True)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--grid", type=parse_grid, required=True,
                   help="start:stop:step, both ends included (use --grid=-a:b:h for negative a)")
    s.add_argument("--im", type=float, default=0.0, help="imaginary part of s for Hn and Mn (s = x + i*im)")
    s.add_argument("--index", type=int, default=1, help="1-based zero index for Fgamma")
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--csv", action="store_true", help="CSV x,re,im (default)")
    fmt.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("norm", parents=[quad], help="||G_n||^2 as JSON")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("verify", parents=[common, quad, height],
                       help="three-route check for a range of n (JSON array)")
    s.add_argument("--n", type=parse_n_range, default=[1, 2, 3, 4, 5], help="e.g. 3, 1..5 or 1,2,4")
    s.add_argument("--workers", type=int, default=1, help="evaluate several n concurrently")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if isinstance(getattr(args, "n", None), int) and args.n < 1:
        parser.error("--n must be a positive integer")
    if getattr(args, "max_k", 0) < 0:
        parser.error("--max-k must be non-negative")
    if hasattr(args, "cache_dir") and args.cache_dir is None:
        args.cache_dir = default_cache_dir()
    try:
        return args.func(args)
    except LiModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
