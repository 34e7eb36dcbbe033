from fractions import Fraction

import pytest
from hypothesis import given

from torus_locus.gaussian import GaussianRational as G
from torus_locus.gaussian import as_gaussian

from .strategies import gaussians, nonzero_gaussians


def test_i_squared_is_minus_one():
    i = G(0, 1)
    assert i * i == G(-1)
    assert i * i == -1


def test_division_matches_hand_computation():
    # (1 + 2i) / (3 - 4i) = (1 + 2i)(3 + 4i) / 25 = (-5 + 10i) / 25
    assert G(1, 2) / G(3, -4) == G(Fraction(-1, 5), Fraction(2, 5))


def test_unit_test_is_exact():
    assert G(Fraction(3, 5), Fraction(4, 5)).is_unit()
    assert not G(Fraction(3, 5), Fraction(4, 5) + Fraction(1, 10**30)).is_unit()


def test_floats_are_refused():
    with pytest.raises(TypeError):
        G(1) + 0.5
    with pytest.raises(TypeError):
        as_gaussian(1.5)


def test_from_complex_is_exact():
    c = G.from_complex(0.1 + 0.25j)
    assert c.re == Fraction(0.1) and c.im == Fraction(1, 4)


def test_hash_agrees_with_rationals():
    assert hash(G(Fraction(1, 2))) == hash(Fraction(1, 2))
    assert G(Fraction(1, 2)) == Fraction(1, 2)


def test_complex_conversion_and_abs():
    assert complex(G(3, -4)) == 3 - 4j
    assert abs(G(3, -4)) == 5


@given(gaussians, gaussians, gaussians)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(gaussians, nonzero_gaussians)
def test_division_inverts_multiplication(a, b):
    assert (a / b) * b == a


@given(gaussians, gaussians)
def test_conjugation_is_multiplicative(a, b):
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a * a.conj()).is_real()
    assert (a * a.conj()).re == a.norm()
