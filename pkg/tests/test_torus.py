import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torus_locus.errors import DegenerateEquationError, ModulusAmbiguityError
from torus_locus.gaussian import GaussianRational as G
from torus_locus.parser import parse_poly
from torus_locus.torus import (
    circle_circle,
    smith_normal_form,
    snf_enumerate,
    solve_monomial_eq,
    solve_trinomial,
)


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def det2(a):
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def points(sol):
    return [pt.coords for pt in sol.points]


def has_point(pts, z, w, tol=1e-9):
    return any(abs(a - z) < tol and abs(b - w) < tol for a, b in pts)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.lists(st.integers(-12, 12), min_size=2, max_size=2), min_size=2, max_size=2))
def test_smith_normal_form_properties(a):
    U, S, V = smith_normal_form(a)
    assert matmul(matmul(U, a), V) == S
    assert abs(det2(U)) == 1 and abs(det2(V)) == 1
    assert S[0][1] == 0 and S[1][0] == 0
    d0, d1 = S[0][0], S[1][1]
    assert d0 >= 0 and d1 >= 0
    if d0 != 0:
        assert d1 % d0 == 0
    else:
        assert d1 == 0
    assert d0 * d1 == abs(det2(a))


def test_monomial_equation_family():
    sol = solve_monomial_eq((2, 1), 1)
    assert sol.kind == "coset_family"
    for zeta in np.exp(1j * np.linspace(0, 6, 7)):
        assert sol.family.contains((zeta, zeta ** -2))
    for pt in sol.family.sample(16):
        z, w = pt.coords
        assert abs(z * z * w - 1) < 1e-12


def test_monomial_equation_modulus():
    sol = solve_monomial_eq((1, 1), G(2))
    assert sol.kind == "empty" and sol.note == "|alpha| != 1"


def test_monomial_equation_free_second_variable():
    sol = solve_monomial_eq((1, 0), G(0, 1))
    assert sol.kind == "coset_family"
    for w in np.exp(1j * np.linspace(0, 6, 5)):
        assert sol.family.contains((1j, w))
    assert not sol.family.contains((-1j, 1))


def test_degenerate_exponents():
    with pytest.raises(DegenerateEquationError):
        solve_monomial_eq((0, 0), G(1))
    assert solve_monomial_eq((0, 0), G(2)).kind == "empty"


def test_circle_circle_cases():
    cc = circle_circle(G(1), G(2))
    assert cc.case == "tangent" and cc.z_values == (1,) and not cc.internal
    assert circle_circle(G(1), G(3)).case == "disjoint_outside"
    cc = circle_circle(G(0, 1), G(1))
    assert cc.case == "two_points"
    expected = [complex(0.5, -math.sqrt(3) / 2), complex(0.5, math.sqrt(3) / 2)]
    for z in cc.z_values:
        assert min(abs(z - e) for e in expected) < 1e-12
        # w solves u + alpha v = beta on the circle
        w = -1j * (1 - z)
        assert abs(abs(w) - 1) < 1e-12
    assert circle_circle(G(Fraction(1, 4)), G(Fraction(1, 2))).case == "disjoint_nested"
    cc = circle_circle(G(3), G(2))
    assert cc.case == "tangent" and cc.internal and abs(cc.z_values[0] + 1) < 1e-15
    assert circle_circle(G(1), G(0)).case == "concentric_equal"


def test_float_tangency_is_refused():
    with pytest.raises(ModulusAmbiguityError):
        circle_circle(1.0, 2.0)


def test_snf_enumerate_examples():
    sol = snf_enumerate([[1, 1], [1, -1]], (1, 1))
    assert sol.kind == "finite" and len(sol) == 2
    assert has_point(points(sol), 1, 1) and has_point(points(sol), -1, -1)
    u0, v0 = cmath.exp(0.7j), cmath.exp(-1.9j)
    sol = snf_enumerate([[2, 3], [1, 2]], (u0, v0))
    assert len(sol) == 1 and has_point(points(sol), u0 ** 2 * v0 ** -3, u0 ** -1 * v0 ** 2)
    sol = snf_enumerate([[1, 0], [0, 1]], (u0, v0))
    assert len(sol) == 1 and has_point(points(sol), u0, v0)


def test_snf_singular_systems():
    assert snf_enumerate([[1, 2], [2, 4]], (1j, 1)).kind == "empty"
    sol = snf_enumerate([[1, 2], [2, 4]], (1j, -1))
    assert sol.kind == "coset_family"
    for pt in sol.family.sample(8):
        z, w = pt.coords
        assert abs(z * w * w - 1j) < 1e-12


def brute_force_torsion(a, order, targets):
    roots = np.exp(2j * np.pi * np.arange(order) / order)
    return [(z, w) for z in roots for w in roots
            if all(abs(z ** r[0] * w ** r[1] - t) < 1e-9 for r, t in zip(a, targets))]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=2, max_size=2),
       st.integers(1, 4), st.integers(0, 3), st.integers(0, 3))
def test_snf_matches_torsion_brute_force(a, n, j0, j1):
    d = det2(a)
    if d == 0:
        return
    targets = (cmath.exp(2j * math.pi * j0 / n), cmath.exp(2j * math.pi * j1 / n))
    sol = snf_enumerate(a, targets)
    oracle = brute_force_torsion(a, n * abs(d), targets)
    assert len(sol) == len(oracle) == abs(d)
    for z, w in oracle:
        assert has_point(points(sol), z, w, 1e-8)


def test_trinomial_examples():
    sol = solve_trinomial(parse_poly("z + w - 2"))
    assert sol.kind == "finite" and len(sol) == 1 and has_point(points(sol), 1, 1, 1e-15)
    p = parse_poly("2*z^2*w^3 + 3*i*z*w^2 - (6/5 + 23/5*i)")
    sol = solve_trinomial(p)
    assert len(sol) == 2
    for z, w in points(sol):
        assert abs(complex(p.eval([z, w]))) < 1e-9
        assert abs(abs(z) - 1) < 1e-12 and abs(abs(w) - 1) < 1e-12
    # one solution is rational: z = (-7 + 24i)/25, w = (3 - 4i)/5 (checked by hand)
    assert has_point(points(sol), complex(-7, 24) / 25, complex(3, -4) / 5, 1e-12)
    assert solve_trinomial(parse_poly("z^2*w - 1")).kind == "coset_family"
    assert solve_trinomial(parse_poly("z*w + 3")).kind == "empty"
    assert solve_trinomial(parse_poly("5*z^3*w")).kind == "empty"
    with pytest.raises(ValueError):
        solve_trinomial(parse_poly("z + w + z*w + 1"))


def test_trinomial_singular_exponents_give_family():
    # z^2 w^2 + z w - 1 = 0: u = zw satisfies u^2 + u - 1 = 0, roots off the circle
    assert solve_trinomial(parse_poly("z^2*w^2 + z*w - 1")).kind == "empty"
    # (zw)^2 + zw + 1 = 0: zw a primitive cube root of unity
    sol = solve_trinomial(parse_poly("z^2*w^2 + z*w + 1"))
    assert sol.kind == "coset_family"
    for pt in sol.family.sample(8):
        z, w = pt.coords
        assert abs((z * w) ** 2 + z * w + 1) < 1e-12
