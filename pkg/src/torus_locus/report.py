"""JSON reports for the command-line tool, and their replay.

Floats are written with 17 significant digits so values survive a
round-trip bit for bit; NaN and infinities become ``null``.
"""

from __future__ import annotations

import json
import math
from typing import Any, Sequence

import numpy as np

from . import __version__
from .blaschke import BlaschkeFactors, CircleMap, VerifyResult, verify_circle_map
from .density import (
    DensityProbe,
    DensityVerdict,
    VarietySpec,
    odd_degree_criterion,
    real_dimension_estimate,
    replay_witness,
    self_star_check,
)
from .laurent import associates
from .parser import format_poly, parse_poly
from .torus import RESIDUAL_TOL, TorusSolutionSet, solve_trinomial

TOOL = "torus-locus"


# serialisation ---------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if s in ("-0", "0"):
        return "0.0" if s == "0" else "-0.0"
    if not any(ch in s for ch in ".eEn"):
        s += ".0"
    return s


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def cplx(c: complex) -> list[float]:
    c = complex(c)
    return [c.real, c.imag]


def uncplx(v: Sequence[float | None]) -> complex:
    return complex(float("nan") if v[0] is None else v[0], float("nan") if v[1] is None else v[1])


# builders ----------------------------------------------------------------


def header(command: str, inputs: dict, config: dict) -> dict:
    return {"tool": TOOL, "version": __version__, "command": command, "input": inputs, "config": config}


def solutions_json(sol: TorusSolutionSet, samples: int = 16) -> dict:
    out: dict[str, Any] = {
        "kind": sol.kind,
        "provenance": sol.provenance,
        "note": sol.note,
        "points": [{"coords": [cplx(c) for c in p.coords], "residual": p.residual} for p in sol.points],
        "family": None,
    }
    if sol.family is not None:
        fam = sol.family
        out["family"] = {
            "components": [{"base": [cplx(b) for b in c.base], "direction": list(c.direction)} for c in fam.components],
            "equation": None if fam.equation is None else
            {"exponents": [fam.equation[0], fam.equation[1]], "alpha": cplx(fam.equation[2])},
            "samples": [{"coords": [cplx(c) for c in p.coords], "residual": p.residual} for p in fam.sample(samples)],
        }
    return out


def _dimension(v: DensityVerdict, n: int) -> int:
    if v.verdict != "Dense":
        return 0
    if v.certificate.witness is not None:
        return real_dimension_estimate(v.certificate.witness)
    # odd-degree path without sampling: dense in a hypersurface of n - 1 complex dimensions
    return n - 1


def decide_report(expr: str, variables: Sequence[str], config: dict, v: DensityVerdict) -> dict:
    cert = v.certificate
    c: dict[str, Any] = {
        "self_star": None if cert.self_star is None else
        {"status": cert.self_star.status, "transcript": cert.self_star.transcript},
        "odd_degree": None if cert.odd_degree is None else {
            "status": cert.odd_degree.status,
            "fiber_var": cert.odd_degree.fiber_var,
            "degree": cert.odd_degree.degree,
            "note": cert.odd_degree.note,
        },
        "solutions": None if cert.solutions is None else solutions_json(cert.solutions),
        "witness": None,
        "real_dimension_estimate": _dimension(v, len(variables)),
        "notes": list(cert.notes),
    }
    if cert.witness is not None and cert.arc is not None and v.probe is not None:
        pr = v.probe
        c["witness"] = {
            "fiber_var": v.fiber_var,
            "probe": {"u": pr.u, "delta": pr.delta, "grid_size": pr.grid_size, "tol": pr.tol},
            "arc": {"branch": cert.arc.branch, "start": cert.arc.start, "length": cert.arc.length},
            "points": [[t, r.real, r.imag] for t, r in cert.arc_points()],
        }
    rep = header("decide", {"expr": expr, "vars": list(variables)}, config)
    rep.update({"verdict": v.verdict, "reason": v.reason, "certificate": c})
    return rep


def solve_report(expr: str, variables: Sequence[str], config: dict, sol: TorusSolutionSet) -> dict:
    rep = header("solve", {"expr": expr, "vars": list(variables)}, config)
    rep["solutions"] = solutions_json(sol)
    return rep


def circle_map_report(sub: str, exprs: Sequence[str], variables: Sequence[str], config: dict,
                      cm: CircleMap | None = None, res: VerifyResult | None = None,
                      factors: BlaschkeFactors | None = None) -> dict:
    rep = header("circle-map", {"subcommand": sub, "exprs": list(exprs), "vars": list(variables)}, config)
    if res is not None:
        rep["status"] = res.status
        num, den = res.numerator, res.denominator
        rep["beta"] = None if res.beta is None else str(res.beta)
        rep["shift"] = None if res.shift is None else list(res.shift)
        rep["sample"] = None if res.sample is None else [cplx(c) for c in res.sample]
        rep["deviation"] = res.deviation
        rep["note"] = res.note
    else:
        assert cm is not None
        rep["status"] = cm.verified
        num, den = cm.numerator, cm.denominator
        rep["beta"] = None if cm.beta is None else str(cm.beta)
        rep["shift"] = None if cm.shift is None else list(cm.shift)
    rep["numerator"] = format_poly(num, variables)
    rep["denominator"] = format_poly(den, variables)
    if factors is not None:
        rep["factors"] = {
            "alphas": [cplx(a) for a in factors.alphas],
            "prefactor": cplx(factors.prefactor),
            "power": factors.power,
        }
    return rep


# replay ------------------------------------------------------------------


class ReplayError(Exception):
    pass


def _check(cond: bool, msg: str):
    if not cond:
        raise ReplayError(msg)


def _replay_points(p, points: list[dict], tol: float):
    for pt in points:
        coords = [uncplx(c) for c in pt["coords"]]
        _check(all(abs(abs(c) - 1) <= tol for c in coords), "solution point off the torus")
        _check(abs(complex(p.eval(coords))) <= RESIDUAL_TOL, "solution point residual too large")


def _replay_solutions(p, sols: dict, tol: float):
    _replay_points(p, sols["points"], 1e-12)
    fresh = solve_trinomial(p, tol)
    _check(fresh.kind == sols["kind"], "solution kind differs on recomputation")
    _check(len(fresh.points) == len(sols["points"]), "solution count differs on recomputation")
    if sols.get("family"):
        _replay_points(p, sols["family"]["samples"], 1e-12)


def _replay_decide(rep: dict):
    variables = rep["input"]["vars"]
    p = parse_poly(rep["input"]["expr"], variables)
    V = VarietySpec.hypersurface(p)
    cert = rep["certificate"]
    tol = float(rep["config"]["tol"])
    ss = self_star_check(V)
    _check(cert["self_star"] is not None and ss.status == cert["self_star"]["status"], "self-star status differs")
    _check(ss.transcript == cert["self_star"]["transcript"], "self-star transcript differs")
    verdict, reason = rep["verdict"], rep["reason"]
    if verdict == "Dense":
        _check(ss.status == "yes", "Dense without the self-star property")
        _check(cert["real_dimension_estimate"] >= 1, "Dense with real dimension estimate 0")
    if reason == "not_self_star":
        _check(verdict == "NotDense" and ss.status == "no", "not_self_star needs a failing associate check")
    elif reason == "exact_point_set":
        _check(cert["solutions"] is not None and cert["solutions"]["kind"] in ("empty", "finite"),
               "exact_point_set needs a finite solution set")
        _replay_solutions(p, cert["solutions"], tol)
    elif reason == "odd_degree":
        od = odd_degree_criterion(V, ss)
        _check(od.status == "dense" and od.fiber_var == cert["odd_degree"]["fiber_var"]
               and od.degree == cert["odd_degree"]["degree"], "odd-degree criterion does not replay")
    elif reason == "branch_witness":
        w = cert["witness"]
        _check(w is not None, "branch witness missing")
        probe = DensityProbe(w["probe"]["u"], w["probe"]["delta"], w["probe"]["grid_size"], w["probe"]["tol"])
        pts = [(t, complex(a, b)) for t, a, b in w["points"]]
        _check(len(pts) == w["arc"]["length"] >= probe.arc_threshold, "arc shorter than the required length")
        # witness points must be on the circle with margin, not merely within tol
        _check(replay_witness(p, w["fiber_var"], pts, probe.tol / 10), "witness points do not replay")
        th = np.array([t for t, _ in pts])
        steps = np.diff(th) % (2 * np.pi)
        spacing = 2 * probe.delta / (probe.grid_size - 1) if not probe.full_circle else 2 * np.pi / probe.grid_size
        _check(bool(np.all(np.abs(steps - spacing) <= 1e-9)), "witness angles are not consecutive grid samples")


def _replay_solve(rep: dict):
    p = parse_poly(rep["input"]["expr"], rep["input"]["vars"])
    _replay_solutions(p, rep["solutions"], float(rep["config"]["tol"]))


def _replay_circle_map(rep: dict):
    variables = rep["input"]["vars"]
    num = parse_poly(rep["numerator"], variables)
    den = parse_poly(rep["denominator"], variables)
    status = rep["status"]
    if status == "proven":
        a = associates(num.star(), den)
        _check(a.unit and str(a.coeff) == rep["beta"] and list(a.shift) == rep["shift"], "associate witness differs")
    elif status == "refuted":
        coords = [uncplx(c) for c in rep["sample"]]
        _check(all(abs(abs(c) - 1) <= 1e-12 for c in coords), "counterexample is off the torus")
        r = complex(num.eval(coords)) / complex(den.eval(coords))
        if abs(abs(r) - 1) <= 1e-6:
            # small violations are only accepted with the exact argument
            res = verify_circle_map((num, den), seed=int(rep["config"].get("seed", 0)))
            _check(res.status == "refuted" and res.note.startswith("exact"), "counterexample does not violate the circle condition")
    else:
        res = verify_circle_map((num, den), seed=int(rep["config"].get("seed", 0)))
        _check(res.status == status, "verification status differs")
    if "factors" in rep:
        from .blaschke import BlaschkeFactors as BF

        f = BF(tuple(uncplx(a) for a in rep["factors"]["alphas"]), uncplx(rep["factors"]["prefactor"]),
               rep["factors"]["power"])
        zs = np.exp(2j * np.pi * (np.arange(64) + 0.25) / 64)
        var = next(iter(set(num.variables_used()) | set(den.variables_used())), 0)
        pts = [np.ones(64, dtype=complex) for _ in range(num.n)]
        pts[var] = zs
        ref = num.eval(pts) / den.eval(pts)
        _check(bool(np.all(np.abs(f.eval(zs) - ref) <= 1e-6 * np.maximum(1, np.abs(ref)))), "factors do not expand to the map")


def replay(rep: dict) -> None:
    """Raise :class:`ReplayError` unless the report's claims recompute."""
    _check(rep.get("tool") == TOOL, "not a torus-locus report")
    cmd = rep.get("command")
    if cmd == "decide":
        _replay_decide(rep)
    elif cmd == "solve":
        _replay_solve(rep)
    elif cmd == "circle-map":
        _replay_circle_map(rep)
    else:
        raise ReplayError(f"unknown report command {cmd!r}")
