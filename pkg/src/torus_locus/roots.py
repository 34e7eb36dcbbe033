"""Univariate complex root finding, unit-circle classification, branch tracking.

Coefficient arrays are in ascending order (index = power) throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateProjectionError, RootFindingError

__all__ = [
    "RootSet",
    "CircleClass",
    "BranchWitness",
    "Arc",
    "roots",
    "roots_batch",
    "circle_classify",
    "classify_moduli",
    "track_branches",
    "track_arrays",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-9
CLUSTER_TOL = 1e-7
RESIDUAL_TOL = 1e-10
_MAX_ITER = 400


@dataclass(frozen=True)
class RootSet:
    """Distinct roots with multiplicities.

    ``residual_bound`` is the largest ``|p(r)|`` over the returned roots.
    ``degree`` is the degree after stripping high-order zero coefficients;
    roots at 0 (from vanishing low-order coefficients) are included.
    """

    roots: np.ndarray
    multiplicities: tuple[int, ...]
    residual_bound: float
    degree: int

    def all_roots(self) -> np.ndarray:
        return np.repeat(self.roots, self.multiplicities)

    @property
    def count(self) -> int:
        return int(sum(self.multiplicities))

    @property
    def distinct(self) -> int:
        return len(self.roots)


def _strip_high(coeffs: Sequence[complex]) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex).ravel()
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise ValueError("all coefficients are zero")
    return c[: nz[-1] + 1]


def _horner(c_desc: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate rows of descending coefficients ``c_desc[..., k]`` at ``x``."""
    out = np.broadcast_to(c_desc[..., :1], x.shape).astype(complex)
    for k in range(1, c_desc.shape[-1]):
        out = out * x + c_desc[..., k : k + 1]
    return out


def _scaled_residual(c_desc: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``|p(x)| / (||c||_1 max(1,|x|)^n)``: equals ``|p(x)|/||c||_1`` inside the unit disc."""
    n = c_desc.shape[-1] - 1
    norm = np.sum(np.abs(c_desc), axis=-1, keepdims=True)
    scale = norm * np.maximum(1.0, np.abs(x)) ** n
    return np.abs(_horner(c_desc, x)) / scale


def _initial_guesses(c_desc: np.ndarray) -> np.ndarray:
    n = c_desc.shape[-1] - 1
    lead = np.abs(c_desc[..., :1])
    tail = np.abs(c_desc[..., -1:])
    radius = np.where(tail > 0, (tail / lead) ** (1.0 / n), 1.0)
    radius = np.clip(radius, 1e-3, 1e3)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    return radius * np.exp(1j * angles)


def _aberth(c_desc: np.ndarray, x: np.ndarray, max_iter: int = _MAX_ITER):
    """Vectorised Aberth-Ehrlich iteration over rows; returns (roots, converged)."""
    n = c_desc.shape[-1] - 1
    d_desc = c_desc[..., :-1] * np.arange(n, 0, -1)
    x = x.copy()
    active = np.ones(x.shape[0], dtype=bool)
    eye = np.eye(n, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        xa = x[active]
        ca = c_desc[active]
        p = _horner(ca, xa)
        dp = _horner(d_desc[active], xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = xa[:, :, None] - xa[:, None, :]
            diff[:, eye] = np.inf
            s = np.sum(1.0 / diff, axis=2)
            delta = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(delta)
        delta[bad] = 1e-8 * (1 + np.abs(xa[bad]))
        xa = xa - delta
        x[active] = xa
        done = np.all(np.abs(delta) <= 4 * np.finfo(float).eps * (1 + np.abs(xa)), axis=1)
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    return x, ~active


def _newton_polish(c_desc: np.ndarray, x: np.ndarray, steps: int = 2) -> np.ndarray:
    n = c_desc.shape[-1] - 1
    d_desc = c_desc[..., :-1] * np.arange(n, 0, -1)
    for _ in range(steps):
        p = _horner(c_desc, x)
        dp = _horner(d_desc, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p / dp
        ok = np.isfinite(step) & (np.abs(step) < 1e-3 * (1 + np.abs(x)))
        cand = np.where(ok, x - step, x)
        better = np.abs(_horner(c_desc, cand)) <= np.abs(p)
        x = np.where(better, cand, x)
    return x


def _companion(c_desc: np.ndarray) -> np.ndarray:
    """Eigenvalues of stacked companion matrices (rows of descending coefficients)."""
    n = c_desc.shape[-1] - 1
    k = c_desc.shape[0]
    m = np.zeros((k, n, n), dtype=complex)
    m[:, 0, :] = -c_desc[:, 1:] / c_desc[:, :1]
    if n > 1:
        m[:, np.arange(1, n), np.arange(n - 1)] = 1.0
    return np.linalg.eigvals(m)


def _cluster(x: np.ndarray, tol: float = CLUSTER_TOL) -> tuple[np.ndarray, tuple[int, ...]]:
    order = np.lexsort((x.imag, x.real))
    x = x[order]
    used = np.zeros(len(x), dtype=bool)
    centers, mults = [], []
    for i in range(len(x)):
        if used[i]:
            continue
        group = [i]
        used[i] = True
        # single linkage within the tolerance
        j = 0
        while j < len(group):
            g = x[group[j]]
            close = (~used) & (np.abs(x - g) <= tol * max(1.0, abs(g)))
            for k in np.flatnonzero(close):
                used[k] = True
                group.append(int(k))
            j += 1
        centers.append(np.mean(x[group]))
        mults.append(len(group))
    return np.array(centers, dtype=complex), tuple(mults)


def roots(coeffs: Sequence[complex]) -> RootSet:
    """All complex roots of ``sum coeffs[k] w^k``.

    Aberth-Ehrlich iteration with a companion-matrix fallback, then Newton
    polishing. Each root meets ``|p(r)| <= 1e-10 ||c||_1 max(1,|r|)^deg``.
    Roots closer than ``1e-7`` (relative) are merged into one root with
    multiplicity.
    """
    c = _strip_high(coeffs)
    deg = len(c) - 1
    if deg == 0:
        return RootSet(np.zeros(0, dtype=complex), (), 0.0, 0)
    nz = np.flatnonzero(c)
    zeros = int(nz[0])
    core = c[zeros:]
    found = [np.zeros(zeros, dtype=complex)]
    m = len(core) - 1
    if m == 1:
        found.append(np.array([-core[0] / core[1]]))
    elif m > 1:
        c_desc = core[::-1][None, :]
        x, ok = _aberth(c_desc, _initial_guesses(c_desc))
        x = _newton_polish(c_desc, x)
        if not ok[0] or np.any(_scaled_residual(c_desc, x) > RESIDUAL_TOL):
            y = _newton_polish(c_desc, _companion(c_desc))
            if np.max(_scaled_residual(c_desc, y)) < np.max(_scaled_residual(c_desc, x)):
                x = y
        if np.any(_scaled_residual(c_desc, x) > RESIDUAL_TOL) or not np.all(np.isfinite(x)):
            raise RootFindingError("root finder did not reach the residual target", best=x[0])
        found.append(x[0])
    allr = np.concatenate(found)
    c_desc_full = c[::-1]
    residual = float(np.max(np.abs(_horner(c_desc_full[None, :], allr[None, :])))) if allr.size else 0.0
    centers, mults = _cluster(allr)
    return RootSet(centers, mults, residual, deg)


def roots_batch(coeff_rows: np.ndarray, guesses: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Roots of many same-degree polynomials at once.

    ``coeff_rows`` has shape ``(K, deg + 1)`` in ascending order and every
    row must have a nonzero leading coefficient. ``guesses`` optionally
    seeds the iteration (e.g. roots of a neighbouring row). Returns
    ``(roots[K, deg], ok[K])`` where ``ok`` marks rows meeting the residual
    target.
    """
    c_desc = np.asarray(coeff_rows, dtype=complex)[:, ::-1]
    k, deg = c_desc.shape[0], c_desc.shape[1] - 1
    if deg == 0:
        return np.zeros((k, 0), dtype=complex), np.ones(k, dtype=bool)
    if deg == 1:
        r = (-c_desc[:, 1] / c_desc[:, 0])[:, None]
        return r, np.isfinite(r[:, 0])
    if deg == 2:
        a, b, cc = c_desc[:, 0], c_desc[:, 1], c_desc[:, 2]
        disc = np.sqrt(b * b - 4 * a * cc)
        # avoid cancellation: pick the larger-magnitude numerator
        sgn = np.where((np.conj(b) * disc).real >= 0, 1.0, -1.0)
        q = -0.5 * (b + sgn * disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = q / a
            r2 = np.where(q != 0, cc / q, 0)
        x = np.stack([r1, r2], axis=1)
    else:
        start = _initial_guesses(c_desc)
        if guesses is not None:
            g = np.asarray(guesses, dtype=complex)
            # coincident seeds stall the iteration, so fall back for those rows
            sep = _min_separation(np.where(np.isfinite(g), g, 0))
            usable = np.all(np.isfinite(g), axis=1) & (sep > 0)
            start = np.where(usable[:, None], g, start)
        x, conv = _aberth(c_desc, start)
        x = _newton_polish(c_desc, x)
        bad = ~conv | np.any(_scaled_residual(c_desc, x) > RESIDUAL_TOL, axis=1)
        if bad.any():
            y = _newton_polish(c_desc[bad], _companion(c_desc[bad]))
            x[bad] = y
    x = _newton_polish(c_desc, x, steps=1)
    ok = np.all(np.isfinite(x), axis=1) & np.all(_scaled_residual(c_desc, x) <= RESIDUAL_TOL, axis=1)
    return x, ok


# circle classification -------------------------------------------------------


@dataclass(frozen=True)
class CircleClass:
    """Partition of a root set by distance of ``|r|`` from 1.

    A root is ambiguous when ``||r| - 1|`` lies within a factor of 10 of
    ``tol`` on either side, i.e. in ``[tol/10, 10 tol]``.
    """

    on_circle: tuple[complex, ...]
    off_circle: tuple[complex, ...]
    ambiguous: tuple[complex, ...]
    tol: float


def classify_moduli(x: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``(on_circle, ambiguous)`` masks."""
    dev = np.abs(np.abs(x) - 1.0)
    return dev <= tol, (dev >= tol / 10) & (dev <= 10 * tol)


def circle_classify(rs: RootSet | Sequence[complex], tol: float = DEFAULT_TOL) -> CircleClass:
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = rs.all_roots() if isinstance(rs, RootSet) else np.asarray(rs, dtype=complex)
    on, amb = classify_moduli(x, tol)
    return CircleClass(
        tuple(complex(v) for v in x[on]),
        tuple(complex(v) for v in x[~on]),
        tuple(complex(v) for v in x[amb]),
        tol,
    )


# branch tracking -------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """A run of consecutive grid samples whose tracked root stays on the circle.

    ``start`` indexes the witness grid; the run may wrap past the end when
    the grid covers the full circle.
    """

    branch: int
    start: int
    length: int
    values: tuple[complex, ...] = ()

    def indices(self, grid: int) -> list[int]:
        return [(self.start + k) % grid for k in range(self.length)]


@dataclass
class BranchWitness:
    """Sampled analytic branches over a grid of base angles.

    ``roots[k]`` holds the fiber roots at ``thetas[k]`` in branch order
    (column ``b`` is branch ``b``); rows of dropped (ramified or failed)
    fibers are NaN. ``continuous[k, b]`` says the step from the previous
    retained fiber into fiber ``k`` stayed within the continuation
    threshold.
    """

    thetas: np.ndarray
    roots: np.ndarray
    retained: np.ndarray
    on_circle: np.ndarray
    ambiguous: np.ndarray
    continuous: np.ndarray
    tol: float
    full_circle: bool
    d: int = 1
    arcs: list[Arc] = field(default_factory=list)

    @property
    def grid(self) -> int:
        return len(self.thetas)

    @property
    def dropped(self) -> np.ndarray:
        return self.thetas[~self.retained]

    def fiber(self, k: int) -> CircleClass:
        x = self.roots[k]
        on, amb = self.on_circle[k], self.ambiguous[k]
        return CircleClass(tuple(x[on]), tuple(x[~on]), tuple(x[amb]), self.tol)

    def branches(self) -> list[list[tuple[float, complex]]]:
        """Per-branch ``(theta, root)`` lists over retained fibers."""
        keep = np.flatnonzero(self.retained)
        return [
            [(float(self.thetas[k]), complex(self.roots[k, b])) for k in keep]
            for b in range(self.roots.shape[1])
        ]

    def best_arc(self) -> Arc | None:
        return max(self.arcs, key=lambda a: (a.length, -a.start, -a.branch), default=None)

    def arc_points(self, arc: Arc) -> list[tuple[float, complex]]:
        return [(float(self.thetas[k]), complex(v)) for k, v in zip(arc.indices(self.grid), arc.values)]


def _match(prev: np.ndarray, nxt: np.ndarray) -> np.ndarray:
    """Greedy nearest-neighbour assignment: ``perm[i]`` is the index in ``nxt`` for ``prev[i]``."""
    d = np.abs(prev[:, None] - nxt[None, :])
    perm = np.argmin(d, axis=1)
    if len(set(perm.tolist())) == len(perm):
        return perm
    perm = -np.ones(len(prev), dtype=int)
    taken = np.zeros(len(nxt), dtype=bool)
    for flat in np.argsort(d, axis=None, kind="stable"):
        i, j = divmod(int(flat), len(nxt))
        if perm[i] < 0 and not taken[j]:
            perm[i] = j
            taken[j] = True
    return perm


def _min_separation(x: np.ndarray) -> np.ndarray:
    """Row-wise smallest distance between roots (inf for a single root)."""
    n = x.shape[1]
    if n < 2:
        return np.full(x.shape[0], np.inf)
    d = np.abs(x[:, :, None] - x[:, None, :])
    d[:, np.arange(n), np.arange(n)] = np.inf
    return d.min(axis=(1, 2))


def _runs(hit: np.ndarray) -> list[tuple[int, int]]:
    """``(start, length)`` of maximal True runs in a 1-D boolean array."""
    out = []
    padded = np.concatenate([[False], hit, [False]]).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    for s, e in zip(edges[::2], edges[1::2]):
        out.append((int(s), int(e - s)))
    return out


def track_arrays(
    thetas: np.ndarray,
    x: np.ndarray,
    retained: np.ndarray,
    tol: float = DEFAULT_TOL,
    full_circle: bool = False,
    min_arc: int = 2,
) -> BranchWitness:
    """Greedy root matching over a grid; rows of ``x`` are per-fiber roots.

    Fibers outside ``retained`` are skipped. A match is continuous when the
    displacement is below half the smaller root separation of the two
    fibers, so the branch identity is unambiguous. When ``full_circle`` is
    set the grid is treated as periodic and arcs may wrap.
    """
    thetas = np.asarray(thetas, dtype=float)
    x = np.asarray(x, dtype=complex)
    retained = np.asarray(retained, dtype=bool).copy()
    k_all, m = x.shape
    if k_all == 0:
        raise DegenerateProjectionError("no fibers to track")
    if not retained.any():
        raise DegenerateProjectionError("every sampled fiber is ramified; the projection looks degenerate")
    sep = _min_separation(np.where(retained[:, None], x, 0))

    def chain(order: np.ndarray):
        """Relabel roots along ``order``; returns (labelled roots, continuity)."""
        lab = np.full((len(order), m), np.nan + 0j)
        cont = np.zeros((len(order), m), dtype=bool)
        pos = np.flatnonzero(retained[order])
        if pos.size == 0:
            return lab, cont
        rows = order[pos]
        xr = x[rows]
        # raw-to-raw matchings between consecutive retained fibers; greedy
        # matching depends only on the distances, not on the labels
        d = np.abs(xr[:-1, :, None] - xr[1:, None, :])
        perms = np.argmin(d, axis=2)
        srt = np.sort(perms, axis=1)
        clash = np.flatnonzero(np.any(srt[:, 1:] == srt[:, :-1], axis=1)) if m > 1 else []
        for j in clash:
            perms[j] = _match(xr[j], xr[j + 1])
        q = np.empty((len(pos), m), dtype=int)
        q[0] = np.arange(m)
        for j in range(len(pos) - 1):
            q[j + 1] = perms[j][q[j]]
        labelled = np.take_along_axis(xr, q, axis=1)
        lab[pos] = labelled
        step = np.abs(labelled[1:] - labelled[:-1])
        thresh = 0.5 * np.minimum(sep[rows[1:]], sep[rows[:-1]])
        adjacent = np.diff(pos) == 1
        cont[pos[1:]] = adjacent[:, None] & (step < thresh[:, None])
        return lab, cont

    order = np.arange(k_all)
    lab, cont = chain(order)
    on, amb = classify_moduli(lab, tol)
    on &= ~amb
    on &= retained[:, None]
    arcs: list[Arc] = []
    if full_circle:
        order2 = np.concatenate([order, order])
        lab2, cont2 = chain(order2)
        on2, amb2 = classify_moduli(lab2, tol)
        good2 = on2 & ~amb2 & retained[order2][:, None]
        for b in range(m):
            hit = good2[:, b].copy()
            # a run continues only across continuous steps
            for s, ln in _runs(hit):
                start = s
                for j in range(s + 1, s + ln):
                    if not cont2[j, b]:
                        _add_arc(arcs, b, start, j - start, k_all, lab2, lab)
                        start = j
                _add_arc(arcs, b, start, s + ln - start, k_all, lab2, lab)
    else:
        for b in range(m):
            hit = on[:, b]
            for s, ln in _runs(hit):
                start = s
                for j in range(s + 1, s + ln):
                    if not cont[j, b]:
                        arcs.append(Arc(b, start, j - start, tuple(lab[start:j, b])))
                        start = j
                arcs.append(Arc(b, start, s + ln - start, tuple(lab[start : s + ln, b])))
    arcs = [a for a in arcs if a.length >= min_arc]
    arcs = _dedupe_arcs(arcs)
    return BranchWitness(thetas, lab, retained, on, amb & retained[:, None], cont, tol, full_circle, 1, arcs)


def _add_arc(arcs, b2, start, length, k_all, lab2, lab):
    """Map an arc found on the doubled grid back onto single-grid branch labels."""
    if length <= 0:
        return
    length = min(length, k_all)
    s = start % k_all
    # label by the single-lap branch carrying the same root at the start
    target = lab2[start, b2]
    b = int(np.nanargmin(np.abs(lab[s] - target)))
    arcs.append(Arc(b, s, length, tuple(lab2[start : start + length, b2])))


def _dedupe_arcs(arcs: list[Arc]) -> list[Arc]:
    seen = {}
    for a in sorted(arcs, key=lambda a: (-a.length, a.start, a.branch)):
        key = (a.branch, a.start)
        if key not in seen:
            seen[key] = a
    return sorted(seen.values(), key=lambda a: (a.start, a.branch, -a.length))


def track_branches(fibers: Sequence[tuple[float, RootSet]], tol: float = DEFAULT_TOL,
                   expected: int | None = None) -> BranchWitness:
    """Match roots between consecutive fibers into branches.

    Fibers whose distinct-root count falls below the generic count (the
    largest seen, or ``expected``) are dropped as ramified.
    """
    if not fibers:
        raise DegenerateProjectionError("no fibers to track")
    generic = expected if expected is not None else max(rs.count for _, rs in fibers)
    thetas = np.array([t for t, _ in fibers], dtype=float)
    x = np.full((len(fibers), generic), np.nan + 0j)
    keep = np.zeros(len(fibers), dtype=bool)
    for k, (_, rs) in enumerate(fibers):
        if rs.count == generic and rs.distinct == generic:
            x[k] = rs.all_roots()
            keep[k] = True
    if not keep.any():
        raise DegenerateProjectionError(
            f"no fiber reaches the generic root count {generic}; the projection looks degenerate"
        )
    return track_arrays(thetas, x, keep, tol)
