"""``torus-locus`` command-line tool.

Exit codes: ``decide`` returns 0/1/2 for Dense/NotDense/Unknown and
``circle-map verify`` returns 0/1/2 for proven/refuted/unknown. Usage and
parse errors return 64, ``solve`` on more than three terms returns 65 and
a failed certificate replay returns 66.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .blaschke import blaschke_factor, make_circle_map, verify_circle_map
from .density import DensityProbe, VarietySpec, decide, sample_branches, default_fiber_var
from .errors import DegenerateProjectionError, ParseError, RootFindingError, TorusLocusError
from .parser import RationalExpr, format_poly, infer_variables, parse_poly
from .report import ReplayError, circle_map_report, decide_report, dumps, replay, solve_report
from .torus import TorusSolutionSet, solve_trinomial

EXIT_USAGE, EXIT_TOO_MANY_TERMS, EXIT_REPLAY = 64, 65, 66
_VERDICT_EXIT = {"Dense": 0, "NotDense": 1, "Unknown": 2}
_STATUS_EXIT = {"proven": 0, "refuted": 1, "unknown": 2}
MAX_SVG_SAMPLES = 1024


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def _grid(s: str) -> int:
    v = int(s)
    if v < 16:
        raise argparse.ArgumentTypeError("grid size must be at least 16")
    return v


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=1e-9, help="circle tolerance (default 1e-9)")
    common.add_argument("--grid", type=_grid, default=4096, help="base grid size (default 4096)")
    common.add_argument("--probes", type=_nonneg, default=32, help="local probe bases (default 32)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
    common.add_argument("--format", choices=["json", "csv", "svg", "text"], default=None)
    common.add_argument("--vars", default=None, help="comma-separated variable names, e.g. z,w")
    common.add_argument("--timing", action="store_true", help="include wall time in JSON output")
    common.add_argument("-o", "--output", default=None, help="write to this file instead of stdout")

    ap = _Parser(prog="torus-locus", description="Unit-torus intersections of algebraic curves.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("decide", parents=[common], help="is the torus intersection Zariski dense?")
    p.add_argument("expr")
    p = sub.add_parser("solve", parents=[common], help="all torus solutions of a curve with at most 3 terms")
    p.add_argument("expr")
    p = sub.add_parser("plot", parents=[common], help="SVG of the sampled branches over the circle")
    p.add_argument("expr")
    p = sub.add_parser("circle-map", parents=[common], help="make, verify or factor circle maps")
    p.add_argument("action", choices=["make", "verify", "factor"])
    p.add_argument("exprs", nargs="+", help="make: p; verify: numerator denominator; factor: p or numerator denominator")
    p = sub.add_parser("verify-certificate", parents=[common], help="replay a JSON report")
    p.add_argument("report")
    return ap


def _variables(args, *texts: str) -> list[str]:
    if args.vars:
        names = [v.strip() for v in args.vars.split(",") if v.strip()]
        if not names:
            raise UsageError("--vars needs at least one name")
        return names
    return infer_variables(*texts, default=("z", "w"))


def _config(args) -> dict:
    return {"tol": args.tol, "grid": args.grid, "probes": args.probes, "seed": args.seed}


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finish(args, rep: dict, started: float) -> None:
    if args.timing:
        rep["timing"] = {"seconds": time.perf_counter() - started}
    _emit(args, dumps(rep))


# decide ------------------------------------------------------------------


def cmd_decide(args) -> int:
    started = time.perf_counter()
    variables = _variables(args, args.expr)
    p = parse_poly(args.expr, variables)
    v = decide(VarietySpec.hypersurface(p), args.grid, args.probes, args.tol)
    rep = decide_report(args.expr, variables, _config(args), v)
    if (args.format or "json") == "text":
        lines = [f"{v.verdict} ({v.reason})", f"self-star: {rep['certificate']['self_star']['status']}"]
        sols = rep["certificate"]["solutions"]
        if sols is not None:
            lines.append(f"exact solutions: {sols['kind']} ({len(sols['points'])} points)")
        w = rep["certificate"]["witness"]
        if w is not None:
            lines.append(f"witness arc: {w['arc']['length']} of {w['probe']['grid_size']} samples")
        lines.extend(rep["certificate"]["notes"])
        _emit(args, "\n".join(lines) + "\n")
    else:
        _finish(args, rep, started)
    return _VERDICT_EXIT[v.verdict]


# solve -------------------------------------------------------------------


def _solve_rows(sol: TorusSolutionSet) -> tuple[list[str], list[list[float]]]:
    comments = [f"kind={sol.kind}"]
    if sol.note:
        comments.append(f"note={sol.note}")
    pts = list(sol.points)
    if sol.family is not None:
        dirs = ";".join(f"({c.direction[0]},{c.direction[1]})" for c in sol.family.components)
        comments.append(f"directions={dirs}")
        comments.append("rows are 16 samples per component")
        pts = sol.family.sample(16)
    rows = [[p.coords[0].real, p.coords[0].imag, p.coords[1].real, p.coords[1].imag, p.residual] for p in pts]
    return comments, rows


def cmd_solve(args) -> int:
    started = time.perf_counter()
    variables = _variables(args, args.expr)
    if len(variables) != 2:
        raise UsageError("solve works with exactly 2 variables")
    p = parse_poly(args.expr, variables)
    if len(p) > 3:
        print(f"torus-locus: {len(p)} terms; solve handles at most 3. Use `torus-locus decide` instead.", file=sys.stderr)
        return EXIT_TOO_MANY_TERMS
    sol = solve_trinomial(p, args.tol)
    fmt = args.format or "csv"
    if fmt == "json":
        _finish(args, solve_report(args.expr, variables, _config(args), sol), started)
    elif fmt in ("csv", "text"):
        comments, rows = _solve_rows(sol)
        buf = io.StringIO()
        buf.write("".join(f"# {c}\n" for c in comments))
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re_z", "im_z", "re_w", "im_w", "residual"])
        for r in rows:
            w.writerow([format(x, ".17g") for x in r])
        _emit(args, buf.getvalue())
    else:
        raise UsageError("solve supports --format csv, json or text")
    return 0


# plot --------------------------------------------------------------------


_W, _H, _M = 800, 520, 50
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _xy(theta: float, y: float, lo: float, hi: float, top: float, height: float) -> tuple[float, float]:
    x = _M + (theta / (2 * math.pi)) * (_W - 2 * _M)
    yy = top + height * (1 - (y - lo) / (hi - lo))
    return x, yy


def _polylines(xs: np.ndarray, ys: np.ndarray, breaks: np.ndarray) -> list[str]:
    out, cur = [], []
    for x, y, b in zip(xs, ys, breaks):
        if b or not (math.isfinite(x) and math.isfinite(y)):
            if len(cur) > 1:
                out.append(" ".join(cur))
            cur = []
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
        cur.append(f"{x:.2f},{y:.2f}")
    if len(cur) > 1:
        out.append(" ".join(cur))
    return out


def render_svg(expr: str, verdict: str, thetas: np.ndarray, branches: np.ndarray, on: np.ndarray,
               points: Sequence[tuple[float, float]], note: str = "") -> str:
    """Two panels over theta in [0, 2 pi): arg of each fiber root, and log10 ||w| - 1|."""
    top1, h1 = _M, 240
    top2, h2 = _M + h1 + 40, 140
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_M}" y="24" font-family="sans-serif" font-size="14">{escape(expr)}: {escape(verdict)}</text>',
        f'<rect x="{_M}" y="{top1}" width="{_W - 2 * _M}" height="{h1}" fill="none" stroke="#888"/>',
        f'<rect x="{_M}" y="{top2}" width="{_W - 2 * _M}" height="{h2}" fill="none" stroke="#888"/>',
        f'<text x="8" y="{top1 + h1 / 2:.0f}" font-family="sans-serif" font-size="11">arg w</text>',
        f'<text x="8" y="{top2 + h2 / 2:.0f}" font-family="sans-serif" font-size="11">log ||w|-1|</text>',
        f'<text x="{_W / 2:.0f}" y="{_H - 10}" font-family="sans-serif" font-size="11">theta = arg z in [0, 2pi)</text>',
    ]
    if note:
        parts.append(f'<text x="{_M}" y="40" font-family="sans-serif" font-size="11" fill="#555">{escape(note)}</text>')
    th = np.mod(thetas, 2 * math.pi)
    order = np.argsort(th, kind="stable")
    th = th[order]
    wrap = np.concatenate([[False], np.diff(th) > 4 * math.pi / max(len(th), 1)])
    for b in range(branches.shape[1]):
        col = _COLORS[b % len(_COLORS)]
        w = branches[order, b]
        arg = np.mod(np.angle(w), 2 * math.pi)
        jump = np.concatenate([[False], np.abs(np.diff(arg)) > math.pi])
        xs, ys = zip(*(_xy(t, a, 0, 2 * math.pi, top1, h1) for t, a in zip(th, arg))) if len(th) else ((), ())
        xs, ys = np.array(xs), np.array(ys)
        for line in _polylines(xs, ys, wrap | jump):
            parts.append(f'<polyline fill="none" stroke="{col}" stroke-width="0.8" stroke-opacity="0.5" points="{line}"/>')
        onb = on[order, b]
        for line in _polylines(np.where(onb, xs, np.nan), np.where(onb, ys, np.nan), wrap | jump):
            parts.append(f'<polyline fill="none" stroke="{col}" stroke-width="2.5" points="{line}"/>')
        dev = np.log10(np.abs(np.abs(w) - 1) + 1e-17)
        dev = np.clip(dev, -17, 1)
        xs2, ys2 = zip(*(_xy(t, d, -17, 1, top2, h2) for t, d in zip(th, dev))) if len(th) else ((), ())
        for line in _polylines(np.array(xs2), np.array(ys2), wrap):
            parts.append(f'<polyline fill="none" stroke="{col}" stroke-width="1" points="{line}"/>')
    for t, a in points:
        x, y = _xy(t % (2 * math.pi), a % (2 * math.pi), 0, 2 * math.pi, top1, h1)
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="none" stroke="black" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(args) -> int:
    variables = _variables(args, args.expr)
    if len(variables) != 2:
        raise UsageError("plot needs a plane curve in 2 variables")
    p = parse_poly(args.expr, variables)
    v = decide(VarietySpec.hypersurface(p), args.grid, args.probes, args.tol)
    grid = min(args.grid, MAX_SVG_SAMPLES)
    note = ""
    try:
        fv = default_fiber_var(p)
        w = sample_branches(p, DensityProbe(0.0, math.pi, grid, args.tol), fv)
        thetas, branches, on = w.thetas, w.roots, w.on_circle & ~w.ambiguous
    except DegenerateProjectionError:
        thetas, branches, on = np.zeros(0), np.zeros((0, 0), dtype=complex), np.zeros((0, 0), dtype=bool)
        fv = 1
    if v.verdict != "Dense":
        note = "no branch witness; traces show fiber roots and their distance to the circle"
    points = []
    sols = v.certificate.solutions
    if sols is not None and sols.is_finite:
        for pt in sols.points:
            a = pt.angles()
            points.append((a[1 - fv], a[fv]))
    svg = render_svg(args.expr, f"{v.verdict} ({v.reason})", thetas, branches, on, points, note)
    _emit(args, svg)
    return 0


# circle maps ---------------------------------------------------------------


def cmd_circle_map(args) -> int:
    started = time.perf_counter()
    exprs = list(args.exprs)
    variables = _variables(args, *exprs)
    polys = [parse_poly(e, variables) for e in exprs]
    config = _config(args)
    fmt = args.format or "json"
    if args.action == "make":
        if len(polys) != 1:
            raise UsageError("circle-map make takes one polynomial")
        cm = make_circle_map(polys[0])
        rep = circle_map_report("make", exprs, variables, config, cm=cm)
        code = 0
    else:
        if len(polys) == 1 and args.action == "factor":
            res = verify_circle_map(make_circle_map(polys[0]).as_rational(), seed=args.seed)
        elif len(polys) == 2:
            res = verify_circle_map(RationalExpr(polys[0], polys[1]), seed=args.seed)
        else:
            raise UsageError(f"circle-map {args.action} takes a numerator and a denominator")
        factors = None
        if args.action == "factor":
            if res.status != "proven":
                print(f"torus-locus: map is {res.status}; only proven maps can be factored", file=sys.stderr)
                _finish(args, circle_map_report("factor", exprs, variables, config, res=res), started)
                return _STATUS_EXIT[res.status]
            factors = blaschke_factor(res.circle_map())
        rep = circle_map_report(args.action, exprs, variables, config, res=res, factors=factors)
        code = _STATUS_EXIT[res.status]
    if fmt == "text":
        lines = [f"{rep['status']}: ({rep['numerator']}) / ({rep['denominator']})"]
        if rep.get("beta") is not None:
            lines.append(f"denominator = {rep['beta']} * monomial{tuple(rep['shift'])} * star(numerator)")
        if "factors" in rep:
            lines.append("alphas: " + ", ".join(f"{complex(*a):.12g}" for a in rep["factors"]["alphas"]))
        _emit(args, "\n".join(lines) + "\n")
    else:
        _finish(args, rep, started)
    return code


def cmd_verify_certificate(args) -> int:
    try:
        with open(args.report, encoding="utf-8") as fh:
            rep = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read report: {exc}") from exc
    try:
        replay(rep)
    except ReplayError as exc:
        print(f"torus-locus: certificate rejected: {exc}", file=sys.stderr)
        return EXIT_REPLAY
    except (KeyError, TypeError, ValueError) as exc:
        print(f"torus-locus: malformed report: {exc}", file=sys.stderr)
        return EXIT_REPLAY
    print("certificate ok")
    return 0


_COMMANDS = {
    "decide": cmd_decide,
    "solve": cmd_solve,
    "plot": cmd_plot,
    "circle-map": cmd_circle_map,
    "verify-certificate": cmd_verify_certificate,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"torus-locus: parse error: {exc.pretty()}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError) as exc:
        print(f"torus-locus: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RootFindingError, TorusLocusError, ZeroDivisionError) as exc:
        print(f"torus-locus: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
