"""Command-line front end.

    probbell table KIND [--dist SPEC] --n-max N [--r R] [--x X] [--format F]
    probbell eval TARGET --dist SPEC --n N ...
    probbell verify all | ID [ID ...] [--max-sum N] [--r-max R] [--dists A,B]
    probbell mc --dist SPEC --n N --k K --samples S --seed SEED

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import classical as cl
from . import moments as mo
from . import probabilistic as pb
from .harness import IDENTITIES, MC_Z_THRESHOLD, default_grid, mc_check, verify
from .moments import DistSpecError, parse_dist

FORMATS = ("plain", "csv", "json")


class UsageError(Exception):
    pass


def fmt_rational(q: Fraction) -> str:
    return str(Fraction(q))


def json_rational(q: Fraction) -> dict:
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def parse_rational(token: str) -> Fraction:
    num, slash, den = token.strip().partition("/")
    try:
        return Fraction(int(num), int(den)) if slash else Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad rational {token!r}: expected an integer or a/b") from None


def _dist(spec: Optional[str], required: bool = True):
    if spec is None:
        if required:
            raise UsageError("--dist is required here")
        return None
    return parse_dist(spec)


# --- table -----------------------------------------------------------------

TRIANGLE_KINDS = ("stirling", "r-stirling", "prob-stirling", "prob-r-stirling")
BELL_KINDS = ("bell", "r-bell", "prob-bell", "prob-r-bell")


def _table_cell(kind: str, model, n: int, k: int, r: int) -> Fraction:
    if kind == "stirling":
        return cl.stirling2(n, k)
    if kind == "r-stirling":
        return cl.r_stirling2(n, k, r)
    if kind == "prob-stirling":
        return pb.prob_stirling2(model, n, k)
    return pb.prob_r_stirling2(model, n, k, r)


def _bell_value(kind: str, model, n: int, r: int, x: Fraction) -> Fraction:
    if kind == "bell":
        return cl.bell_poly(n, x)
    if kind == "r-bell":
        return cl.r_bell_poly(n, r, x)
    if kind == "prob-bell":
        return pb.prob_bell_poly(model, n, x)
    return pb.prob_r_bell_poly(model, n, r, x)


def render_table(kind: str, dist: Optional[str], n_max: int, r: int, x: Fraction, fmt: str) -> str:
    if kind not in TRIANGLE_KINDS + BELL_KINDS:
        raise UsageError(f"unsupported table kind {kind!r}")
    if n_max < 0 or r < 0:
        raise UsageError("--n-max and --r must be nonnegative")
    model = _dist(dist, required=kind.startswith("prob-"))
    out = io.StringIO()
    if kind in TRIANGLE_KINDS:
        rows = [[_table_cell(kind, model, n, k, r) for k in range(n + 1)] for n in range(n_max + 1)]
        if fmt == "json":
            doc = {
                "kind": kind,
                "dist": model.canonical_id if model else None,
                "r": r,
                "rows": [{"n": n, "values": [json_rational(v) for v in row]} for n, row in enumerate(rows)],
            }
            return json.dumps(doc) + "\n"
        if fmt == "csv":
            w = csv.writer(out, lineterminator="\n")
            w.writerow(["n"] + [str(k) for k in range(n_max + 1)])
            for n, row in enumerate(rows):
                padded = row + [Fraction(0)] * (n_max - n)
                w.writerow([n] + [fmt_rational(v) for v in padded])
            return out.getvalue()
        for n, row in enumerate(rows):
            out.write(f"{n}: " + " ".join(fmt_rational(v) for v in row) + "\n")
        return out.getvalue()

    values = [_bell_value(kind, model, n, r, x) for n in range(n_max + 1)]
    if fmt == "json":
        doc = {
            "kind": kind,
            "dist": model.canonical_id if model else None,
            "r": r,
            "x": fmt_rational(x),
            "values": [{"n": n, "value": json_rational(v)} for n, v in enumerate(values)],
        }
        return json.dumps(doc) + "\n"
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "value"])
        for n, v in enumerate(values):
            w.writerow([n, fmt_rational(v)])
        return out.getvalue()
    for n, v in enumerate(values):
        out.write(f"{n}: {fmt_rational(v)}\n")
    return out.getvalue()


# --- eval ------------------------------------------------------------------


def _parse_ls(token: str) -> tuple[int, ...]:
    if token.strip() == "":
        return ()
    try:
        return tuple(int(t) for t in token.split(","))
    except ValueError:
        raise UsageError(f"bad --ls {token!r}: expected comma-separated integers") from None


# target -> (required params, evaluator)
EVAL_TARGETS: dict[str, tuple[tuple[str, ...], Callable[..., Fraction]]] = {
    "moment": (("dist", "n"), lambda a: mo.moment(a["dist"], a["n"])),
    "sum-moment": (("dist", "k", "n"), lambda a: mo.sum_moment(a["dist"], a["k"], a["n"])),
    "joint-moment": (("dist", "p", "ls"), lambda a: mo.joint_moment(a["dist"], a["p"], a["ls"])),
    "stirling": (("n", "k"), lambda a: cl.stirling2(a["n"], a["k"])),
    "r-stirling": (("n", "k", "r"), lambda a: cl.r_stirling2(a["n"], a["k"], a["r"])),
    "bell": (("n", "x"), lambda a: cl.bell_poly(a["n"], a["x"])),
    "r-bell": (("n", "r", "x"), lambda a: cl.r_bell_poly(a["n"], a["r"], a["x"])),
    "spivey-classical": (("n", "k"), lambda a: cl.spivey_classical_rhs(a["n"], a["k"])),
    "prob-stirling": (("dist", "n", "k"), lambda a: pb.prob_stirling2(a["dist"], a["n"], a["k"])),
    "prob-r-stirling": (
        ("dist", "n", "k", "r"),
        lambda a: pb.prob_r_stirling2(a["dist"], a["n"], a["k"], a["r"]),
    ),
    "prob-r-stirling-egf": (
        ("dist", "n", "k", "r"),
        lambda a: pb.prob_r_stirling2_egf(a["dist"], a["n"], a["k"], a["r"]),
    ),
    "prob-bell": (("dist", "n", "x"), lambda a: pb.prob_bell_poly(a["dist"], a["n"], a["x"])),
    "prob-r-bell": (
        ("dist", "n", "r", "x"),
        lambda a: pb.prob_r_bell_poly(a["dist"], a["n"], a["r"], a["x"]),
    ),
    "prob-r-bell-partial": (
        ("dist", "n", "r", "x"),
        lambda a: pb.prob_r_bell_via_partial_bell(a["dist"], a["n"], a["r"], a["x"]),
    ),
    "recurrence": (
        ("dist", "n", "r", "x"),
        lambda a: pb.recurrence_step(a["dist"], a["n"], a["r"], a["x"]),
    ),
    "spivey-rhs": (
        ("dist", "y", "r", "n", "j"),
        lambda a: pb.spivey_general_rhs(a["dist"], a["y"], a["r"], a["n"], a["j"]),
    ),
    "spivey-numbers-rhs": (
        ("dist", "n", "l"),
        lambda a: pb.spivey_numbers_rhs(a["dist"], a["n"], a["l"]),
    ),
    "spivey-poly-rhs": (
        ("dist", "y", "n", "l"),
        lambda a: pb.spivey_poly_rhs(a["dist"], a["y"], a["n"], a["l"]),
    ),
}


def evaluate(target: str, params: dict) -> Fraction:
    if target not in EVAL_TARGETS:
        raise UsageError(f"unknown eval target {target!r}")
    required, fn = EVAL_TARGETS[target]
    missing = [p for p in required if params.get(p) is None]
    if missing:
        raise UsageError(f"{target} needs " + ", ".join("--" + m for m in missing))
    args = dict(params)
    if args.get("dist") is not None:
        args["dist"] = parse_dist(args["dist"])
    for name in ("x", "y"):
        if args.get(name) is not None:
            args[name] = parse_rational(args[name])
    if args.get("ls") is not None:
        args["ls"] = _parse_ls(args["ls"])
    for name in ("n", "k", "r", "j", "l", "p"):
        if args.get(name) is not None and args[name] < 0:
            raise UsageError(f"--{name} must be nonnegative")
    return fn(args)


# --- verify ----------------------------------------------------------------


def run_verify(
    ids: Sequence[str],
    max_sum: Optional[int],
    r_max: Optional[int],
    dists: Optional[str],
    fmt: str,
    timing: bool,
) -> tuple[str, int]:
    if list(ids) == ["all"]:
        ids = list(IDENTITIES)
    for i in ids:
        if i not in IDENTITIES:
            raise UsageError(f"unknown identity {i!r}; choose from all, " + ", ".join(IDENTITIES))
    models = None
    if dists:
        models = tuple(parse_dist(s) for s in _split_dists(dists))
    reports = []
    for ident in ids:
        grid = default_grid(ident)
        if max_sum is not None:
            grid = replace(grid, max_degree=max_sum)
        if r_max is not None and grid.r_max is not None:
            grid = replace(grid, r_max=r_max)
        reports.append(verify(ident, grid, models))

    failed = sum(1 for r in reports if not r.passed)
    out = io.StringIO()
    if fmt == "json":
        doc = {
            "reports": [r.to_dict(include_timing=timing) for r in reports],
            "identities": len(reports),
            "failed": failed,
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        header = ["identity", "cases", "failures", "status"] + (["elapsed_ms"] if timing else [])
        w.writerow(header)
        for r in reports:
            row = [r.identity_id, r.cases_run, len(r.failures), "pass" if r.passed else "fail"]
            if timing:
                row.append(f"{r.elapsed * 1000:.1f}")
            w.writerow(row)
    else:
        for r in reports:
            line = f"{'PASS' if r.passed else 'FAIL'}  {r.identity_id:<18} cases={r.cases_run}"
            if r.failures:
                line += f" failures={len(r.failures)}"
            if timing:
                line += f" elapsed_ms={r.elapsed * 1000:.1f}"
            out.write(line + "\n")
            for f in r.failures[:5]:
                out.write(f"    {json.dumps(f.to_dict())}\n")
        if failed:
            out.write(f"{failed} of {len(reports)} identities FAILED\n")
        else:
            out.write(f"all {len(reports)} identities passed\n")
    return out.getvalue(), (1 if failed else 0)


def _split_dists(text: str) -> list[str]:
    """Split a comma list of specs; commas inside binomial/finite specs belong
    to the preceding spec unless they start a new ``kind:`` token."""
    kinds = ("det:", "bernoulli:", "binomial:", "poisson:", "geometric:", "finite:")
    specs: list[str] = []
    for piece in text.split(","):
        if specs and not piece.strip().startswith(kinds):
            specs[-1] += "," + piece
        else:
            specs.append(piece.strip())
    return specs


# --- mc --------------------------------------------------------------------


def run_mc(dist: str, n: int, k: int, samples: int, seed: int, threshold: float, fmt: str) -> tuple[str, int]:
    model = parse_dist(dist)
    if n < 0 or k < 0:
        raise UsageError("--n and --k must be nonnegative")
    if samples < 100:
        raise UsageError("--samples must be at least 100")
    if not 0 <= seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    est = mc_check(model, n, k, samples, seed)
    ok = est.within(threshold)
    d = est.to_dict()
    d["pass"] = ok
    if fmt == "json":
        text = json.dumps(d) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(d))
        w.writerow([repr(v) if isinstance(v, float) else v for v in d.values()])
        text = buf.getvalue()
    else:
        text = (
            f"target   {est.target}\n"
            f"samples  {est.samples}\n"
            f"estimate {est.estimate!r}\n"
            f"stderr   {est.stderr!r}\n"
            f"exact    {est.exact}\n"
            f"z        {est.z_score!r}\n"
            f"{'PASS' if ok else 'FAIL'} (|z| <= {threshold})\n"
        )
    return text, (0 if ok else 1)


# --- argument parsing --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="probbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("table", help="print a triangle of Stirling-type numbers or a Bell column")
    t.add_argument("kind", choices=TRIANGLE_KINDS + BELL_KINDS)
    t.add_argument("--dist")
    t.add_argument("--n-max", type=int, required=True)
    t.add_argument("--r", type=int, default=0)
    t.add_argument("--x", default="1")
    t.add_argument("--format", choices=FORMATS, default="csv")

    e = sub.add_parser("eval", help="evaluate one quantity exactly")
    e.add_argument("target", choices=sorted(EVAL_TARGETS))
    e.add_argument("--dist")
    for name in ("n", "k", "r", "j", "l", "p"):
        e.add_argument(f"--{name}", type=int)
    e.add_argument("--x")
    e.add_argument("--y")
    e.add_argument("--ls", help="comma-separated positive exponents")
    e.add_argument("--format", choices=FORMATS, default="plain")

    v = sub.add_parser("verify", help="check identities over parameter grids")
    v.add_argument("ids", nargs="+", help="identity ids or 'all'")
    v.add_argument("--max-sum", type=int, help="override the degree bound of every grid")
    v.add_argument("--r-max", type=int)
    v.add_argument("--dists", help="comma-separated distribution specs replacing the default models")
    v.add_argument("--format", choices=FORMATS, default="plain")
    v.add_argument("--timing", action="store_true", help="include elapsed times (output no longer reproducible)")

    m = sub.add_parser("mc", help="Monte Carlo check of E[S_k^n]")
    m.add_argument("--dist", required=True)
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--k", type=int, required=True)
    m.add_argument("--samples", type=int, default=10**6)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--threshold", type=float, default=MC_Z_THRESHOLD)
    m.add_argument("--format", choices=FORMATS, default="plain")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    code = 0
    try:
        if args.command == "table":
            text = render_table(args.kind, args.dist, args.n_max, args.r, parse_rational(args.x), args.format)
        elif args.command == "eval":
            params = {name: getattr(args, name) for name in ("dist", "n", "k", "r", "j", "l", "p", "x", "y", "ls")}
            value = evaluate(args.target, params)
            if args.format == "json":
                text = json.dumps({"target": args.target, "value": json_rational(value)}) + "\n"
            elif args.format == "csv":
                text = f"target,value\n{args.target},{fmt_rational(value)}\n"
            else:
                text = fmt_rational(value) + "\n"
        elif args.command == "verify":
            if args.max_sum is not None and args.max_sum < 0 or args.r_max is not None and args.r_max < 0:
                raise UsageError("grid bounds must be nonnegative")
            text, code = run_verify(args.ids, args.max_sum, args.r_max, args.dists, args.format, args.timing)
        else:
            text, code = run_mc(args.dist, args.n, args.k, args.samples, args.seed, args.threshold, args.format)
    except (UsageError, DistSpecError) as exc:
        print(f"probbell: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"probbell: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
