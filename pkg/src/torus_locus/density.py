"""Deciding whether a variety meets the unit torus in a Zariski-dense set.

The pipeline combines two exact tests with a sampling semidecision:

* necessity: a dense intersection forces every generator to be a
  unit-monomial multiple of its star (checked exactly per generator);
* sufficiency: a self-star hypersurface whose projection forgetting one
  variable has odd degree is dense, because the star involution acts on
  each odd-sized torus fiber and must fix a point of the circle;
* sampling: over a grid of base angles, fiber roots are computed, tracked
  into branches and a contiguous arc of on-circle roots is certified.

``Unknown`` is an honest outcome whenever none of these applies.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateProjectionError, VariableCountError, ZeroPolynomialError
from .laurent import Associate, LaurentPoly, associates, content_in
from .roots import DEFAULT_TOL, Arc, BranchWitness, classify_moduli, roots, roots_batch, track_arrays
from .torus import TorusSolutionSet, solve_trinomial

__all__ = [
    "VarietySpec",
    "DensityProbe",
    "DensityVerdict",
    "Certificate",
    "SelfStarResult",
    "OddDegreeResult",
    "self_star_check",
    "projection_degree",
    "odd_degree_criterion",
    "sample_branches",
    "sample_decide",
    "real_dimension_estimate",
    "decide",
    "fiber_parity_rate",
    "replay_witness",
]

DENSE, NOT_DENSE, UNKNOWN = "Dense", "NotDense", "Unknown"
RESIDUAL_TOL = 1e-9
_SEPARATION_TOL = 1e-7
_DROP_TOL = 1e-12


@dataclass(frozen=True)
class VarietySpec:
    generators: tuple[LaurentPoly, ...]
    projection: tuple[int, ...] | None = None

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ValueError("a variety needs at least one generator")
        if any(g.is_zero() for g in gens):
            raise ZeroPolynomialError("generators must be nonzero")
        if len({g.n for g in gens}) != 1:
            raise VariableCountError("generators live in different numbers of variables")
        if self.projection is not None:
            object.__setattr__(self, "projection", tuple(self.projection))

    @classmethod
    def hypersurface(cls, p: LaurentPoly, projection: Sequence[int] | None = None) -> VarietySpec:
        return cls((p,), tuple(projection) if projection is not None else None)

    @property
    def n(self) -> int:
        return self.generators[0].n

    @property
    def is_plane_curve(self) -> bool:
        return self.n == 2 and len(self.generators) == 1


@dataclass(frozen=True)
class DensityProbe:
    """Grid of base angles: ``grid_size`` samples covering ``[u - delta, u + delta]``.

    ``delta >= pi`` means the whole circle, sampled periodically.
    """

    u: float = 0.0
    delta: float = math.pi
    grid_size: int = 4096
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not (self.delta > 0 and self.tol > 0):
            raise ValueError("delta and tol must be positive")
        if self.grid_size < 16:
            raise ValueError("grid_size must be at least 16")

    @property
    def full_circle(self) -> bool:
        return self.delta >= math.pi

    def thetas(self) -> np.ndarray:
        if self.full_circle:
            return (self.u + 2 * math.pi * np.arange(self.grid_size) / self.grid_size) % (2 * math.pi)
        return self.u + np.linspace(-self.delta, self.delta, self.grid_size)

    @property
    def arc_threshold(self) -> int:
        return math.ceil(self.grid_size / 8)


@dataclass
class SelfStarResult:
    status: str  # yes | no | inconclusive
    transcript: list[dict]

    def replay(self, generators: Sequence[LaurentPoly]) -> bool:
        """Recompute every associate check and compare with the transcript."""
        if len(generators) != len(self.transcript):
            return False
        for g, rec in zip(generators, self.transcript):
            a = associates(g, g.star())
            if a.kind != rec["kind"]:
                return False
            if a.related and (a.shift != tuple(rec["shift"]) or str(a.coeff) != rec["coeff"]):
                return False
        return True


@dataclass(frozen=True)
class OddDegreeResult:
    status: str  # dense | inapplicable
    fiber_var: int | None = None
    degree: int | None = None
    note: str = ""


@dataclass
class Certificate:
    self_star: SelfStarResult | None = None
    witness: BranchWitness | None = None
    arc: Arc | None = None
    solutions: TorusSolutionSet | None = None
    odd_degree: OddDegreeResult | None = None
    notes: list[str] = field(default_factory=list)

    def arc_points(self) -> list[tuple[float, complex]]:
        if self.witness is None or self.arc is None:
            return []
        return self.witness.arc_points(self.arc)


@dataclass
class DensityVerdict:
    verdict: str
    reason: str
    certificate: Certificate
    probe: DensityProbe | None = None
    fiber_var: int | None = None

    @property
    def dense(self) -> bool:
        return self.verdict == DENSE


# symbolic tests --------------------------------------------------------------


def self_star_check(V: VarietySpec) -> SelfStarResult:
    """Per-generator test ``g* = c z^t g`` with ``|c| = 1``.

    ``no`` is only claimed for hypersurfaces; with several generators a
    failing generator does not rule out a self-star ideal.
    """
    transcript = []
    ok = True
    for g in V.generators:
        a: Associate = associates(g, g.star())
        transcript.append(
            {
                "generator": str(g),
                "star": str(g.star()),
                "kind": a.kind,
                "coeff": None if a.coeff is None else str(a.coeff),
                "shift": None if a.shift is None else list(a.shift),
            }
        )
        ok = ok and a.unit
    if ok:
        return SelfStarResult("yes", transcript)
    return SelfStarResult("no" if len(V.generators) == 1 else "inconclusive", transcript)


def fiber_degree(p: LaurentPoly, fiber_var: int) -> int:
    """Generic size of the fibers of the projection forgetting ``fiber_var``."""
    if fiber_var not in p.variables_used():
        raise DegenerateProjectionError(f"variable {fiber_var} does not occur: the projection is not finite")
    return p.degree_span(fiber_var)


def projection_degree(V: VarietySpec, coord: int) -> int:
    """Degree of the projection of a plane curve onto coordinate ``coord``.

    This is the exponent span of the other variable, which is the generic
    fiber size for a squarefree generator.
    """
    if not V.is_plane_curve:
        raise ValueError("projection_degree expects a single generator in 2 variables")
    return fiber_degree(V.generators[0], 1 - coord)


def _content_is_trivial(p: LaurentPoly, fiber_var: int) -> bool:
    try:
        return len(content_in(p, fiber_var)) == 1
    except NotImplementedError:
        return True


def odd_degree_criterion(V: VarietySpec, self_star: SelfStarResult | None = None) -> OddDegreeResult:
    """One-sided sufficient test: self-star plus an odd-degree dominant projection.

    The generator is assumed to define an irreducible hypersurface. Plane
    curves with a factor depending only on the base variable are refused,
    because such vertical components are not covered by the fiber argument.
    """
    if len(V.generators) != 1:
        return OddDegreeResult("inapplicable", note="only hypersurfaces are supported")
    ss = self_star or self_star_check(V)
    if ss.status != "yes":
        return OddDegreeResult("inapplicable", note="not self-star")
    p = V.generators[0]
    candidates = list(range(p.n - 1, -1, -1))
    if V.projection is not None:
        candidates = [k for k in candidates if k not in V.projection]
    notes = []
    for k in candidates:
        if k not in p.variables_used():
            continue
        deg = fiber_degree(p, k)
        if deg % 2 == 0:
            continue
        if p.n == 2 and not _content_is_trivial(p, k):
            notes.append(f"variable {k}: odd degree {deg} but the curve has a vertical factor")
            continue
        return OddDegreeResult("dense", k, deg)
    return OddDegreeResult("inapplicable", note="; ".join(notes) or "no projection of odd degree")


# sampling ------------------------------------------------------------------


def _fiber_coefficients(p: LaurentPoly, fiber_var: int, base: Sequence[np.ndarray]) -> np.ndarray:
    """Rows of ascending fiber-polynomial coefficients, one per base point."""
    parts = p.split_by(fiber_var)
    lo, hi = min(parts), max(parts)
    size = np.broadcast_shapes(*(np.shape(b) for b in base)) if base else ()
    k = int(np.prod(size)) if size else 1
    point = [np.asarray(b, dtype=complex).reshape(-1) for b in base]
    point.insert(fiber_var, np.ones(1, dtype=complex))
    rows = np.zeros((k, hi - lo + 1), dtype=complex)
    for e, part in parts.items():
        rows[:, e - lo] = np.broadcast_to(part.eval(point), (k,))
    return rows


def _seeded_roots(rows: np.ndarray, stride: int = 16):
    """Solve every ``stride``-th row cold, then seed the rest from the nearest solved row.

    Consecutive rows come from neighbouring base points, so their roots are
    close and the seeded iteration converges in a few steps.
    """
    k = rows.shape[0]
    if k <= 4 * stride or rows.shape[1] <= 3:
        return roots_batch(rows)
    anchors = np.arange(0, k, stride)
    ra, oka = roots_batch(rows[anchors])
    near = np.clip(np.rint(np.arange(k) / stride).astype(int), 0, len(anchors) - 1)
    seeds = np.where(oka[near][:, None], ra[near], np.nan)
    return roots_batch(rows, seeds)


def _fiber_roots(rows: np.ndarray):
    """Roots for each coefficient row; returns ``(roots[K, deg], retained[K])``.

    A fiber is retained when its degree does not drop at either end and its
    roots are pairwise separated, i.e. it is unramified.
    """
    k, m = rows.shape
    deg = m - 1
    x = np.full((k, deg), np.nan + 0j)
    if deg == 0:
        return x, np.zeros(k, dtype=bool)
    scale = np.max(np.abs(rows), axis=1)
    good = (np.abs(rows[:, -1]) > _DROP_TOL * scale) & (np.abs(rows[:, 0]) > _DROP_TOL * scale)
    if good.any():
        idx = np.flatnonzero(good)
        r, ok = _seeded_roots(rows[good])
        for j in np.flatnonzero(~ok):
            try:
                rs = roots(rows[idx[j]])
                if rs.count == deg:
                    r[j] = rs.all_roots()
                    ok[j] = True
            except Exception:
                pass
        x[idx[ok]] = r[ok]
        good[idx[~ok]] = False
    if deg > 1:
        safe = np.where(good[:, None], x, 0)
        d = np.abs(safe[:, :, None] - safe[:, None, :])
        d[:, np.arange(deg), np.arange(deg)] = np.inf
        sep = d.min(axis=(1, 2))
        good &= sep > _SEPARATION_TOL * np.maximum(1.0, np.max(np.abs(safe), axis=1))
    x[~good] = np.nan
    return x, good


def default_fiber_var(p: LaurentPoly, projection: Sequence[int] | None = None) -> int:
    used = p.variables_used()
    if projection is not None:
        free = [k for k in range(p.n) if k not in projection]
        if len(free) != 1 or free[0] not in used:
            raise DegenerateProjectionError("declared projection does not leave exactly one occurring fiber variable")
        return free[0]
    for k in range(p.n - 1, -1, -1):
        if k in used:
            return k
    raise DegenerateProjectionError("constant generator has no fibers")


def sample_branches(p: LaurentPoly, probe: DensityProbe, fiber_var: int | None = None) -> BranchWitness:
    """Fiber roots over the probe's angle grid, tracked into branches (plane curves)."""
    if p.n != 2:
        raise ValueError("branch sampling is implemented for plane curves")
    fv = default_fiber_var(p) if fiber_var is None else fiber_var
    thetas = probe.thetas()
    z = np.exp(1j * thetas)
    rows = _fiber_coefficients(p, fv, [z])
    x, keep = _fiber_roots(rows)
    return track_arrays(thetas, x, keep, probe.tol, probe.full_circle)


def replay_witness(p: LaurentPoly, fiber_var: int, points: Sequence[tuple[float, complex]],
                   tol: float = DEFAULT_TOL, residual_tol: float = RESIDUAL_TOL) -> bool:
    """Re-evaluate each ``(theta, root)``: residual and circle membership."""
    if not points:
        return False
    th = np.array([t for t, _ in points], dtype=float)
    r = np.array([v for _, v in points], dtype=complex)
    base = np.exp(1j * th)
    coords = [base, r] if fiber_var == 1 else [r, base]
    res = np.abs(p.eval(coords))
    return bool(np.all(res <= residual_tol) and np.all(np.abs(np.abs(r) - 1) <= tol))


def real_dimension_estimate(witness: BranchWitness | None) -> int:
    """1 when some tracked branch stays on the circle over an arc, else 0."""
    if witness is None:
        return 0
    best = witness.best_arc()
    return 1 if best is not None and best.length >= 2 else 0


def _finite_exact(p: LaurentPoly) -> TorusSolutionSet | None:
    if p.n == 2 and len(p) <= 3:
        return solve_trinomial(p)
    return None


def _try_probe(p: LaurentPoly, probe: DensityProbe, fv: int):
    try:
        w = sample_branches(p, probe, fv)
    except DegenerateProjectionError:
        return None, None
    best = w.best_arc()
    if best is not None and best.length >= probe.arc_threshold and replay_witness(p, fv, w.arc_points(best), probe.tol):
        return w, best
    return w, None


def sample_decide(V: VarietySpec, probe: DensityProbe, self_star: SelfStarResult | None = None) -> DensityVerdict:
    """Single-probe semidecision for a plane curve.

    ``Dense`` needs a tracked branch with at least ``grid_size / 8``
    consecutive unambiguous on-circle samples that replays cleanly;
    ``NotDense`` is only returned with an exact reason.
    """
    ss = self_star or self_star_check(V)
    cert = Certificate(self_star=ss)
    if ss.status == "no":
        return DensityVerdict(NOT_DENSE, "not_self_star", cert, probe)
    if not V.is_plane_curve:
        cert.notes.append("sampling supports plane curves only")
        return DensityVerdict(UNKNOWN, "inconclusive", cert, probe)
    p = V.generators[0]
    exact = _finite_exact(p)
    if exact is not None and exact.is_finite:
        cert.solutions = exact
        return DensityVerdict(NOT_DENSE, "exact_point_set", cert, probe)
    fv = default_fiber_var(p, V.projection)
    w, arc = _try_probe(p, probe, fv)
    cert.witness, cert.arc = w, arc
    if arc is not None:
        return DensityVerdict(DENSE, "branch_witness", cert, probe, fv)
    return DensityVerdict(UNKNOWN, "no_branch_found", cert, probe, fv)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TORUS_LOCUS_THREADS", "1")))
    except ValueError:
        return 1


def local_probes(count: int, grid_size: int, tol: float) -> list[DensityProbe]:
    """``count`` evenly spaced base points, each with a ball reaching its neighbours."""
    delta = 2 * math.pi / count
    g = max(16, grid_size // 8)
    return [DensityProbe(2 * math.pi * j / count, delta, g, tol) for j in range(count)]


def decide(V: VarietySpec, grid_size: int = 4096, probe_bases: int = 32, tol: float = DEFAULT_TOL) -> DensityVerdict:
    """Full pipeline: self-star, exact few-term solving, odd degree, sampling."""
    main = DensityProbe(0.0, math.pi, grid_size, tol)
    ss = self_star_check(V)
    cert = Certificate(self_star=ss)
    p = V.generators[0] if len(V.generators) == 1 else None

    if ss.status == "no":
        if p is not None:
            cert.solutions = _finite_exact(p)
        return DensityVerdict(NOT_DENSE, "not_self_star", cert, None)
    if p is None:
        cert.notes.append("several generators: only the per-generator self-star test is available")
        return DensityVerdict(UNKNOWN, "inconclusive", cert, None)

    if p.n == 2:
        exact = _finite_exact(p)
        if exact is not None:
            cert.solutions = exact
            if exact.is_finite:
                return DensityVerdict(NOT_DENSE, "exact_point_set", cert, None)

    odd = odd_degree_criterion(V, ss)
    cert.odd_degree = odd
    if odd.status == "dense":
        verdict = DensityVerdict(DENSE, "odd_degree", cert, None, odd.fiber_var)
        if p.n == 2:
            # attach a sampled witness as supporting evidence
            w, arc = _try_probe(p, main, odd.fiber_var)
            if w is not None:
                cert.witness = w
                cert.arc = arc if arc is not None else w.best_arc()
                verdict.probe = main
        return _checked(verdict)

    if p.n != 2:
        cert.notes.append("sampling supports plane curves only")
        return DensityVerdict(UNKNOWN, "inconclusive", cert, None)

    fv = default_fiber_var(p, V.projection)
    w, arc = _try_probe(p, main, fv)
    if arc is not None:
        cert.witness, cert.arc = w, arc
        return _checked(DensityVerdict(DENSE, "branch_witness", cert, main, fv))
    probes = local_probes(probe_bases, grid_size, tol) if probe_bases > 0 else []
    workers = _threads()
    if workers > 1 and len(probes) > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(lambda pr: _try_probe(p, pr, fv), probes))
    else:
        results = []
        for pr in probes:
            results.append(_try_probe(p, pr, fv))
            if results[-1][1] is not None:
                break
    for pr, (wl, arcl) in zip(probes, results):
        if arcl is not None:
            cert.witness, cert.arc = wl, arcl
            return _checked(DensityVerdict(DENSE, "branch_witness", cert, pr, fv))
    cert.witness = w
    cert.arc = w.best_arc() if w is not None else None
    cert.notes.append(f"no on-circle arc found with the full grid or {len(probes)} local probes")
    return DensityVerdict(UNKNOWN, "no_branch_found", cert, main, fv)


def _checked(v: DensityVerdict) -> DensityVerdict:
    # a dense intersection forces the self-star property
    assert v.certificate.self_star is not None and v.certificate.self_star.status == "yes"
    return v


def fiber_parity_rate(p: LaurentPoly, fiber_var: int | None = None, samples: int = 512, seed: int = 0,
                      tol: float = DEFAULT_TOL) -> tuple[float, int]:
    """Fraction of generic torus fibers with at least one on-circle root.

    Base points are drawn uniformly on the torus of the remaining
    variables. Returns ``(rate, generic_count)``.
    """
    fv = default_fiber_var(p) if fiber_var is None else fiber_var
    rng = np.random.default_rng(seed)
    base = [np.exp(1j * rng.uniform(0, 2 * math.pi, samples)) for _ in range(p.n - 1)]
    rows = _fiber_coefficients(p, fv, base)
    x, keep = _fiber_roots(rows)
    if not keep.any():
        return 0.0, 0
    on, _ = classify_moduli(x[keep], tol)
    return float(np.mean(on.any(axis=1))), int(keep.sum())


def torus_fiber_roots(p: LaurentPoly, thetas: np.ndarray, fiber_var: int | None = None):
    """Fiber roots of a plane curve above ``exp(i theta)``; ``(roots, retained)``."""
    fv = default_fiber_var(p) if fiber_var is None else fiber_var
    rows = _fiber_coefficients(p, fv, [np.exp(1j * np.asarray(thetas, dtype=float))])
    return _fiber_roots(rows)
