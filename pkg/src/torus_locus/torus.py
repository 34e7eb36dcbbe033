"""Exact torus solutions of one-, two- and three-term plane-curve equations.

Two-term equations reduce to a monomial equation ``z^a w^b = alpha``.
Three-term equations are divided through to ``u + alpha v = beta`` with
``u = z^a w^b`` and ``v = z^c w^d``; the unit-modulus values of ``u`` are the
intersections of the unit circle with the circle of radius ``|alpha|``
about ``beta``, and each ``(u, v)`` pair is pulled back to ``(z, w)`` through
the Smith normal form of the exponent matrix.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegenerateEquationError, ModulusAmbiguityError, ZeroPolynomialError
from .gaussian import GaussianRational
from .laurent import LaurentPoly

__all__ = [
    "TorusPoint",
    "CosetComponent",
    "CosetFamily",
    "TorusSolutionSet",
    "CircleIntersection",
    "smith_normal_form",
    "solve_monomial_eq",
    "circle_circle",
    "snf_enumerate",
    "solve_trinomial",
]

TWO_PI = 2 * math.pi
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[complex, ...]
    residual: float = 0.0

    def angles(self) -> tuple[float, ...]:
        return tuple(cmath.phase(c) % TWO_PI for c in self.coords)


@dataclass(frozen=True)
class CosetComponent:
    """The circle ``{base * zeta^direction : zeta in S1}`` (coordinatewise)."""

    base: tuple[complex, complex]
    direction: tuple[int, int]

    def point(self, zeta: complex) -> tuple[complex, complex]:
        return (self.base[0] * zeta ** self.direction[0], self.base[1] * zeta ** self.direction[1])

    def contains(self, point: Sequence[complex], tol: float = 1e-9) -> bool:
        d0, d1 = self.direction
        g, x, y = _ext_gcd(d0, d1)
        q0 = point[0] / self.base[0]
        q1 = point[1] / self.base[1]
        # g == 1 for unimodular directions; zeta = q0^x q1^y
        zeta = q0 ** x * q1 ** y
        z0, z1 = self.point(zeta)
        return abs(z0 - point[0]) <= tol and abs(z1 - point[1]) <= tol


@dataclass(frozen=True)
class CosetFamily:
    """A finite union of one-parameter torus cosets."""

    components: tuple[CosetComponent, ...]
    equation: tuple[int, int, complex] | None = None

    def sample(self, m: int = 16) -> list[TorusPoint]:
        out = []
        for comp in self.components:
            for k in range(m):
                zeta = cmath.exp(1j * TWO_PI * k / m)
                out.append(TorusPoint(comp.point(zeta)))
        return out

    def contains(self, point: Sequence[complex], tol: float = 1e-9) -> bool:
        return any(c.contains(point, tol) for c in self.components)

    def section(self, z: complex) -> list[complex]:
        """All ``w`` with ``z^a w^b = alpha`` for the recorded monomial equation.

        The principal root of ``alpha z^-a`` times every ``|b|``-th root of
        unity, sorted by angle.
        """
        if self.equation is None:
            raise ValueError("family has no single defining monomial equation")
        a, b, alpha = self.equation
        if b == 0:
            raise ValueError("w is free: the equation does not involve w")
        base = (alpha * z ** (-a)) ** (1.0 / b)
        k = abs(b)
        ws = [base * cmath.exp(1j * TWO_PI * j / k) for j in range(k)]
        return sorted(ws, key=lambda v: cmath.phase(v) % TWO_PI)


@dataclass(frozen=True)
class TorusSolutionSet:
    kind: str  # empty | finite | coset_family
    points: tuple[TorusPoint, ...] = ()
    family: CosetFamily | None = None
    provenance: str = ""
    note: str = ""

    @property
    def is_finite(self) -> bool:
        return self.kind in ("empty", "finite")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class CircleIntersection:
    """Unit circle against the circle of radius ``|alpha|`` centred at ``beta``."""

    alpha_abs: float
    beta: complex
    case: str  # disjoint_outside | tangent | two_points | disjoint_nested | concentric_equal
    z_values: tuple[complex, ...] = ()
    internal: bool = False
    exact: bool = True


# integer linear algebra -----------------------------------------------------


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, x, y)`` with ``a x + b y = g >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _identity(k: int) -> list[list[int]]:
    return [[int(i == j) for j in range(k)] for i in range(k)]


def smith_normal_form(a: Sequence[Sequence[int]]):
    """Return ``(U, S, V)`` with ``U A V = S`` diagonal, ``s_i | s_{i+1}``, ``s_i >= 0``.

    ``U`` and ``V`` are unimodular integer matrices (lists of rows).
    """
    A = [list(map(int, row)) for row in a]
    m = len(A)
    n = len(A[0]) if m else 0
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q row_src
        A[dst] = [x + q * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for M in (A, V):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            piv = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                return U, A, V
            swap_rows(t, piv[0])
            swap_cols(t, piv[1])
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return U, A, V


def _det2(a) -> int:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


# monomial systems -----------------------------------------------------------


def _angle(c) -> float:
    """Argument in turns (fraction of a full turn) in ``[0, 1)``."""
    return (cmath.phase(complex(c)) / TWO_PI) % 1.0


def _unit(c: complex) -> complex:
    return c / abs(c)


def _sort_key(pt: TorusPoint):
    return tuple(round(a, 12) for a in pt.angles())


def _monomial_system(A: Sequence[Sequence[int]], targets: Sequence[complex], tol: float):
    """Solve ``z^{A[i,0]} w^{A[i,1]} = targets[i]`` on the torus.

    Returns ``("empty", [])``, ``("finite", points)`` or
    ``("coset_family", components)``.
    """
    U, S, V = smith_normal_form(A)
    m = len(A)
    diag = [S[i][i] if i < 2 else 0 for i in range(m)]
    # transformed targets in turns: t_i = sum_j U_ij b_j
    b = [_angle(t) for t in targets]
    t_turns = [sum(U[i][j] * b[j] for j in range(m)) for i in range(m)]
    rank = sum(1 for i in range(min(m, 2)) if diag[i] != 0)
    for i in range(rank, m):
        # zero rows of S: the transformed target must be 1
        if abs(cmath.exp(1j * TWO_PI * t_turns[i]) - 1) > tol:
            return "empty", []
    if rank == 0:
        raise DegenerateEquationError("exponent matrix is zero and targets are 1: every torus point solves it")
    choices = [
        [(t_turns[i] + k) / diag[i] for k in range(diag[i])] for i in range(rank)
    ]

    def to_zw(y):
        x0 = V[0][0] * y[0] + V[0][1] * y[1]
        x1 = V[1][0] * y[0] + V[1][1] * y[1]
        return cmath.exp(1j * TWO_PI * x0), cmath.exp(1j * TWO_PI * x1)

    if rank == 2:
        pts = [to_zw((y0, y1)) for y0 in choices[0] for y1 in choices[1]]
        return "finite", pts
    comps = [
        CosetComponent(to_zw((y0, 0.0)), (V[0][1], V[1][1])) for y0 in choices[0]
    ]
    return "coset_family", comps


def _is_unit_modulus(alpha, tol: float) -> bool:
    if isinstance(alpha, GaussianRational):
        return alpha.is_unit()
    return abs(abs(complex(alpha)) - 1.0) <= tol


def solve_monomial_eq(exps: Sequence[int], alpha, tol: float = 1e-9) -> TorusSolutionSet:
    """All torus solutions of ``z^a w^b = alpha``.

    Empty unless ``|alpha| = 1`` (tested exactly for Gaussian rationals);
    otherwise a union of ``gcd(a, b)`` one-parameter cosets.
    """
    a, b = int(exps[0]), int(exps[1])
    if a == 0 and b == 0:
        if (alpha == 1) if isinstance(alpha, GaussianRational) else abs(complex(alpha) - 1) <= tol:
            raise DegenerateEquationError("equation reads 1 = 1: every torus point is a solution")
        return TorusSolutionSet("empty", provenance="degenerate_exponents", note="equation reads 1 = alpha with alpha != 1")
    if not _is_unit_modulus(alpha, tol):
        return TorusSolutionSet("empty", provenance="monomial", note="|alpha| != 1")
    kind, comps = _monomial_system([[a, b]], [complex(alpha)], tol)
    fam = CosetFamily(tuple(comps), (a, b, complex(alpha)))
    return TorusSolutionSet("coset_family", family=fam, provenance="monomial")


def circle_circle(alpha, beta, tol: float = 1e-12) -> CircleIntersection:
    """Intersect the unit circle with ``S(beta, |alpha|)``.

    With Gaussian-rational data all comparisons use the exact quantity
    ``D = (|alpha|^2 + 1 - |beta|^2)^2 - 4 |alpha|^2``: ``D < 0`` gives two
    points, ``D = 0`` a tangency, ``D > 0`` no points (outside or nested
    according to the sign of ``|alpha|^2 + 1 - |beta|^2``). Float data never
    reports a tangency; a ``|D| <= tol`` boundary raises
    :class:`ModulusAmbiguityError`.
    """
    exact = isinstance(alpha, GaussianRational) and isinstance(beta, GaussianRational)
    if exact:
        A, B = alpha.norm(), beta.norm()
        if A == 0:
            raise ValueError("alpha must be nonzero")
        t = A + 1 - B
        D = t * t - 4 * A
    else:
        a, bc = complex(alpha), complex(beta)
        if a == 0:
            raise ValueError("alpha must be nonzero")
        A, B = abs(a) ** 2, abs(bc) ** 2
        t = A + 1 - B
        D = t * t - 4 * A
        if abs(D) <= tol:
            raise ModulusAmbiguityError("tangency cannot be decided from float data; pass exact coefficients")
    r = math.sqrt(float(A))
    bf = complex(beta)
    if B == 0:
        if A == 1:
            return CircleIntersection(r, bf, "concentric_equal", (), exact=exact)
        return CircleIntersection(r, bf, "disjoint_nested", (), exact=exact)
    d = abs(bf)
    direction = bf / d
    if D > 0:
        case = "disjoint_outside" if t < 0 else "disjoint_nested"
        return CircleIntersection(r, bf, case, (), exact=exact)
    if D == 0:
        internal = t > 0
        # external: tangent point faces beta; internal with r > 1: faces away
        z = -direction if (internal and A > 1) else direction
        return CircleIntersection(r, bf, "tangent", (z,), internal=internal, exact=exact)
    cos_phi = float(Fraction(1) + B - A) / (2 * d) if exact else (1 + B - A) / (2 * d)
    phi = math.acos(max(-1.0, min(1.0, cos_phi)))
    zs = [_unit(direction * cmath.exp(1j * phi)), _unit(direction * cmath.exp(-1j * phi))]
    zs.sort(key=lambda z: cmath.phase(z) % TWO_PI)
    return CircleIntersection(r, bf, "two_points", tuple(zs), exact=exact)


def snf_enumerate(A: Sequence[Sequence[int]], targets: Sequence[complex], tol: float = 1e-9) -> TorusSolutionSet:
    """All ``(z, w)`` on the torus with ``z^{A00} w^{A01} = u0``, ``z^{A10} w^{A11} = v0``.

    Nonsingular ``A`` gives exactly ``|det A|`` points; singular ``A`` gives
    a coset family or nothing, depending on whether the targets are
    compatible (checked to ``tol``).
    """
    if any(abs(abs(complex(t)) - 1) > tol for t in targets):
        raise ValueError("targets must lie on the unit circle")
    kind, out = _monomial_system(A, [complex(t) for t in targets], tol)
    if kind == "empty":
        return TorusSolutionSet("empty", provenance="snf", note="incompatible targets")
    if kind == "finite":
        pts = []
        for z, w in out:
            res = max(
                abs(z ** A[0][0] * w ** A[0][1] - complex(targets[0])),
                abs(z ** A[1][0] * w ** A[1][1] - complex(targets[1])),
            )
            pts.append(TorusPoint((z, w), res))
        pts.sort(key=_sort_key)
        return TorusSolutionSet("finite", tuple(pts), provenance="snf")
    return TorusSolutionSet("coset_family", family=CosetFamily(tuple(out)), provenance="snf")


def _residual(p: LaurentPoly, z: complex, w: complex) -> float:
    return abs(p.eval((z, w)))


def solve_trinomial(p: LaurentPoly, tol: float = 1e-9) -> TorusSolutionSet:
    """Complete torus solution set of a plane-curve equation with at most three terms."""
    if p.n != 2:
        raise ValueError("solve_trinomial needs a polynomial in exactly 2 variables")
    if p.is_zero():
        raise ZeroPolynomialError("the zero polynomial vanishes everywhere")
    terms = p.sorted_terms()
    if len(terms) > 3:
        raise ValueError(f"{len(terms)} terms; only equations with at most 3 terms are solved exactly")
    if len(terms) == 1:
        return TorusSolutionSet("empty", provenance="one_term", note="a monomial has no zeros on the torus")
    if len(terms) == 2:
        (e1, c1), (e2, c2) = terms
        alpha = -c2 / c1
        sol = solve_monomial_eq((e1[0] - e2[0], e1[1] - e2[1]), alpha, tol)
        return TorusSolutionSet(sol.kind, sol.points, sol.family, "two_term:" + sol.provenance, sol.note)
    (e1, c1), (e2, c2), (e3, c3) = terms
    mat = [[e1[0] - e3[0], e1[1] - e3[1]], [e2[0] - e3[0], e2[1] - e3[1]]]
    alpha = c2 / c1
    beta = -c3 / c1
    cc = circle_circle(alpha, beta)
    tag = f"circle_circle:{cc.case}" + (":internal" if cc.internal else "")
    if not cc.z_values:
        return TorusSolutionSet("empty", provenance=tag, note=f"circles do not meet ({cc.case})")
    a_c, b_c = complex(alpha), complex(beta)
    pts: list[TorusPoint] = []
    comps: list[CosetComponent] = []
    for u0 in cc.z_values:
        v0 = _unit((b_c - u0) / a_c)
        sub = snf_enumerate(mat, (u0, v0), tol)
        if sub.kind == "finite":
            for pt in sub.points:
                z, w = pt.coords
                pts.append(TorusPoint((z, w), _residual(p, z, w)))
        elif sub.kind == "coset_family":
            comps.extend(sub.family.components)
    det = _det2(mat)
    if det == 0:
        if not comps:
            return TorusSolutionSet("empty", provenance=tag + ":singular", note="ad - bc = 0 and no compatible targets")
        return TorusSolutionSet("coset_family", family=CosetFamily(tuple(comps)), provenance=tag + ":singular")
    pts.sort(key=_sort_key)
    return TorusSolutionSet("finite", tuple(pts), provenance=tag + f":det={det}")


def newton_polish_torus(p: LaurentPoly, z: complex, w: complex, steps: int = 8) -> tuple[complex, complex]:
    """Refine an approximate torus zero of ``p`` using angle coordinates.

    Solves ``Re p = Im p = 0`` in ``(arg z, arg w)`` by Gauss-Newton; used by
    the brute-force grid oracle.
    """
    dz, dw = p.derivative(0), p.derivative(1)
    th = np.array([cmath.phase(z), cmath.phase(w)])
    for _ in range(steps):
        zz, ww = cmath.exp(1j * th[0]), cmath.exp(1j * th[1])
        f = p.eval((zz, ww))
        j = np.array([1j * zz * dz.eval((zz, ww)), 1j * ww * dw.eval((zz, ww))])
        J = np.array([[j[0].real, j[1].real], [j[0].imag, j[1].imag]])
        step, *_ = np.linalg.lstsq(J, -np.array([f.real, f.imag]), rcond=None)
        th = th + step
        if np.linalg.norm(step) < 1e-15:
            break
    return cmath.exp(1j * th[0]), cmath.exp(1j * th[1])
