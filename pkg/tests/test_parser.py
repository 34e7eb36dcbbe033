import pytest
from hypothesis import given, settings

from torus_locus.errors import ParseError
from torus_locus.gaussian import GaussianRational as G
from torus_locus.laurent import LaurentPoly
from torus_locus.parser import format_coefficient, format_poly, infer_variables, parse_poly, parse_rational

from .strategies import gaussians, laurent_polys


def test_sample_inputs():
    p = parse_poly("z^2*w - 1")
    assert dict(p.terms) == {(2, 1): G(1), (0, 0): G(-1)}
    q = parse_poly("2*z^2*w^3 + 3*i*z*w^2 - (6/5 + 23/5*i)")
    assert len(q) == 3
    assert q.coefficient((1, 2)) == G(0, 3)
    assert q.coefficient((0, 0)) == G(-6, -23) / 5


def test_negative_exponents():
    p = parse_poly("z^-1 + w^-1 - 2")
    assert p.min_exponents() == (-1, -1)
    assert parse_poly("z^(-2)") == LaurentPoly.monomial((-2, 0))


def test_imaginary_literal_forms():
    assert parse_poly("3i") == parse_poly("3*i")
    assert parse_poly("-i*z") == LaurentPoly.monomial((1, 0), G(0, -1))


@pytest.mark.parametrize(
    "text, pos",
    [
        ("", 0),
        ("z w", 2),
        ("2z", 1),
        ("z +", 3),
        ("(z + 1", 6),
        ("z^1.5", 3),
        ("z / w", 2),
        ("(z+1)^-1", 0),
        ("z # 1", 2),
        ("1/0", 2),
    ],
)
def test_errors_report_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_poly(text)
    assert info.value.position == pos
    if text:
        assert "^" in info.value.pretty()


def test_zw_is_an_unknown_identifier():
    with pytest.raises(ParseError, match="unknown variable 'zw'"):
        parse_poly("zw - 1")


def test_printing():
    assert format_poly(LaurentPoly.zero(2)) == "0"
    assert format_poly(parse_poly("z^2*w - 1")) == "z^2*w - 1"
    assert format_poly(parse_poly("z - i*w")) == "z - i*w"
    assert format_coefficient(G(3, 2) / 2) == "(3/2 + i)"


def test_variable_inference():
    assert infer_variables("z + w") == ["z", "w"]
    assert infer_variables("z1*z10 + z2") == ["z1", "z2", "z10"]
    assert infer_variables("z - 1", default=("z", "w")) == ["z", "w"]


def test_rational_expression():
    r = parse_rational("z - 2", "1 - 2*z", ["z"])
    assert abs(r.eval([1j]) - (1j - 2) / (1 - 2j)) < 1e-15


@settings(max_examples=300, deadline=None)
@given(laurent_polys(n=2, max_terms=6, exp=5))
def test_round_trip(p):
    assert parse_poly(format_poly(p)) == p


@settings(max_examples=100, deadline=None)
@given(laurent_polys(n=3, max_terms=4, exp=3))
def test_round_trip_three_variables(p):
    names = ["z1", "z2", "z3"]
    assert parse_poly(format_poly(p), names) == p


@given(gaussians)
def test_coefficient_round_trip(c):
    assert parse_poly(format_coefficient(c)) == LaurentPoly.constant(c, 2)
