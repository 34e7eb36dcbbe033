from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torus_locus.errors import PoleError, VariableCountError, VerticalComponentError, ZeroPolynomialError
from torus_locus.gaussian import GaussianRational as G
from torus_locus.laurent import (
    LaurentPoly,
    associates,
    content_in,
    exact_quotient,
    fiber_restrict,
    normalize,
    star,
    univariate_gcd,
)
from torus_locus.parser import parse_poly

from .strategies import laurent_polys, nonzero_laurent_polys

P = parse_poly


def torus_points(rng, n, k=5):
    return [np.exp(1j * rng.uniform(0, 2 * np.pi, k)) for _ in range(n)]


def test_products():
    assert P("(z + 1)*(z - 1)") == P("z^2 - 1")
    assert P("z + w") * LaurentPoly.zero(2) == LaurentPoly.zero(2)
    prod = P("z + w - 2") * P("z*w")
    assert prod == P("z^2*w + z*w^2 - 2*z*w")
    rng = np.random.default_rng(0)
    pts = [rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(2)]
    np.testing.assert_allclose(prod.eval(pts), P("z + w - 2").eval(pts) * pts[0] * pts[1])


def test_mismatched_variable_counts():
    with pytest.raises(VariableCountError):
        LaurentPoly.variable(0, 1) + LaurentPoly.variable(0, 2)


def test_star_examples_against_torus_evaluation():
    rng = np.random.default_rng(1)
    for text, expected in [("z^2*w - 1", "z^-2*w^-1 - 1"), ("z + w - 2", "z^-1 + w^-1 - 2")]:
        p = P(text)
        assert star(p) == P(expected)
        # on the torus, star(p)(s) = conj(p(s))
        s = torus_points(rng, 2)
        np.testing.assert_allclose(star(p).eval(s), np.conj(p.eval(s)), atol=1e-12)


def test_normalize():
    q, sc = normalize(P("z^-2*w^-1 - 1"))
    assert q == P("z^2*w - 1")
    assert sc.apply(q) == P("z^-2*w^-1 - 1")
    q, sc = normalize(P("3*i*z"))
    assert q == LaurentPoly.constant(1, 2)
    assert sc.coeff == G(0, 3) and sc.shift == (1, 0)
    q2, sc2 = normalize(q)
    assert q2 == q and sc2.coeff == 1 and sc2.shift == (0, 0)
    with pytest.raises(ZeroPolynomialError):
        normalize(LaurentPoly.zero(2))


def test_associates_examples():
    a = associates(P("z^2*w - 1"), P("z^-2*w^-1 - 1"))
    assert a.unit and a.coeff == -1 and a.shift == (-2, -1)
    assert P("z^-2*w^-1 - 1") == P("z^2*w - 1").shift(a.shift).scale(a.coeff)
    assert associates(P("z + w - 2"), P("z + w - 2*z*w")).kind == "no"
    p = P("3*z - i*w^2")
    a = associates(p, p)
    assert a.unit and a.coeff == 1 and a.shift == (0, 0)
    assert associates(p, p.scale(2)).kind == "nonunit"


def test_eval_examples():
    assert P("z^2*w - 1").eval((1, 1)) == 0
    assert P("z + w - 2").eval((1, 1)) == 0
    with pytest.raises(PoleError):
        P("z^-1").eval((0, 1))


def test_fiber_restriction_examples():
    f = fiber_restrict(P("z^2*w - 1"), [1j], 1)
    np.testing.assert_allclose(f.coeffs, [-1, -1])
    f = fiber_restrict(P("w^2 - z"), [1], 1)
    np.testing.assert_allclose(f.coeffs, [-1, 0, 1])
    f = fiber_restrict(P("z + w - 2"), [1], 1)
    np.testing.assert_allclose(f.coeffs, [-1, 1])
    with pytest.raises(VerticalComponentError):
        fiber_restrict(P("z - 1"), [1], 1)


def test_fiber_restriction_shift_and_zero_roots():
    f = fiber_restrict(P("w^-1 + w^2*z"), [2], 1)
    # w^-1 (1 + 2 w^3): shift 1, no zero roots
    assert f.shift == 1 and f.zero_roots == 0
    np.testing.assert_allclose(f.coeffs, [1, 0, 0, 2])
    # a monomial factor goes into the shift; a coefficient that vanishes
    # only after substitution counts as a root at 0
    f = fiber_restrict(P("w^3 - z*w^2"), [1], 1)
    assert f.shift == -2 and f.zero_roots == 0
    f = fiber_restrict(P("w^3 - z*w^2 + (z - 1)*w"), [1], 1)
    assert f.shift == -1 and f.zero_roots == 1
    np.testing.assert_allclose(f.coeffs, [-1, 1])


def test_gcd_and_quotient():
    a = P("(z - 1)*(z + 2)", ["z"])
    b = P("(z - 1)*(z - 3)*z^2", ["z"])
    assert univariate_gcd(a, b, 0) == P("z - 1", ["z"])
    assert exact_quotient(b, P("z - 1", ["z"]), 0) == P("(z - 3)*z^2", ["z"])
    with pytest.raises(ArithmeticError):
        exact_quotient(a, P("z - 5", ["z"]), 0)


def test_content_detects_vertical_factor():
    p = P("(z + 1)*(w - 2) ")
    assert content_in(p, 1) == P("z + 1")
    assert len(content_in(P("w*(2+z) - (1+2*z)"), 1)) == 1


@settings(max_examples=200, deadline=None)
@given(laurent_polys(n=2), laurent_polys(n=2))
def test_star_is_multiplicative_involution(p, q):
    assert star(star(p)) == p
    assert star(p * q) == star(p) * star(q)
    assert star(p + q) == star(p) + star(q)


@settings(max_examples=100, deadline=None)
@given(nonzero_laurent_polys(n=3, max_terms=5), st.integers(0, 2**32 - 1))
def test_star_matches_conjugation_on_torus(p, seed):
    s = torus_points(np.random.default_rng(seed), 3)
    np.testing.assert_allclose(star(p).eval(s), np.conj(p.eval(s)), atol=1e-9 * (1 + p.coefficient_norm()))


@settings(max_examples=100, deadline=None)
@given(nonzero_laurent_polys(n=2), st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
       st.sampled_from([G(1), G(-1), G(0, 1), G(Fraction(3, 5), Fraction(4, 5)), G(2, 1)]))
def test_associate_witness_is_exact(p, t, c):
    q = p.shift(t).scale(c)
    a = associates(p, q)
    assert a.related and q == p.shift(a.shift).scale(a.coeff)
    assert a.unit == c.is_unit()


@settings(max_examples=100, deadline=None)
@given(nonzero_laurent_polys(n=2))
def test_normalize_is_canonical(p):
    q, sc = normalize(p)
    assert sc.apply(q) == p
    assert min(q.min_exponents()) >= 0 and all(x == 0 for x in q.min_exponents())
    assert q.leading_term()[1] == 1
    assert normalize(q)[0] == q
