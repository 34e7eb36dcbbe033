import numpy as np
import pytest

from torus_locus.blaschke import (
    CircleMap,
    blaschke_factor,
    expand_blaschke,
    make_circle_map,
    unit_from_angle,
    verify_circle_map,
)
from torus_locus.errors import ZeroPolynomialError
from torus_locus.gaussian import GaussianRational as G
from torus_locus.laurent import LaurentPoly, random_poly
from torus_locus.parser import parse_poly, parse_rational

Z = ["z"]


def test_make_examples():
    cm = make_circle_map(parse_poly("z - 2", Z))
    assert cm.numerator == parse_poly("z - 2", Z) and cm.denominator == parse_poly("1 - 2*z", Z)
    assert cm.verified == "proven"
    cm = make_circle_map(parse_poly("1", Z))
    assert cm.numerator == cm.denominator
    cm = make_circle_map(parse_poly("z1*z2 + 2", ["z1", "z2"]))
    assert cm.denominator == parse_poly("1 + 2*z1*z2", ["z1", "z2"])
    rng = np.random.default_rng(0)
    s = [np.exp(1j * rng.uniform(0, 2 * np.pi, 64)) for _ in range(2)]
    assert np.max(np.abs(np.abs(cm.eval(s)) - 1)) < 1e-9
    with pytest.raises(ZeroPolynomialError):
        make_circle_map(LaurentPoly.zero(1))


def test_verify_examples():
    r = verify_circle_map(parse_rational("z - 2", "1 - 2*z", Z))
    assert r.status == "proven" and r.beta == 1 and r.shift == (1,)
    r = verify_circle_map(parse_rational("z + 1", "z - 1", Z))
    assert r.status == "refuted" and abs(abs(r.sample[0]) - 1) < 1e-12 and r.deviation > 1e-6
    r = verify_circle_map(parse_rational("(3/5 + 4/5*i)*z^3", "1", Z))
    assert r.status == "proven"
    with pytest.raises(ZeroDivisionError):
        verify_circle_map((parse_poly("z", Z), LaurentPoly.zero(1)))


def test_verify_cancels_common_factors():
    # (z - 2)(z - 5) / ((1 - 2z)(z - 5)) reduces to a proven map
    r = verify_circle_map(parse_rational("(z - 2)*(z - 5)", "(1 - 2*z)*(z - 5)", Z))
    assert r.status == "proven"


def test_verify_unknown_for_unreduced_multivariate_pair():
    # a shared factor z1 + z2 + 3 in two variables is not cancelled, and the
    # reduced map is a proven circle map, so no counterexample exists
    v = ["z1", "z2"]
    r = verify_circle_map(parse_rational("(z1*z2 + 2)*(z1 + z2 + 3)", "(1 + 2*z1*z2)*(z1 + z2 + 3)", v))
    assert r.status == "unknown"


def test_tiny_violation_is_refuted_exactly():
    r = verify_circle_map(parse_rational("7*i", "7*i + 1/1000", Z))
    assert r.status == "refuted" and r.note.startswith("exact")


def test_proven_flag_is_checked():
    with pytest.raises(ValueError):
        CircleMap(parse_poly("z - 2", Z), parse_poly("1 - 3*z", Z), "proven")


def test_factor_examples():
    f = blaschke_factor(make_circle_map(parse_poly("z - 2", Z)))
    assert len(f.alphas) == 1 and abs(f.alphas[0] - 2) < 1e-12 and abs(f.prefactor - 1) < 1e-12
    f = blaschke_factor(expand_blaschke([], G(0, 1)))
    assert f.alphas == () and f.prefactor == 1j
    alphas = [0.5, 1j / 3, 1 + 1j]
    f = blaschke_factor(expand_blaschke(alphas))
    for a in alphas:
        assert min(abs(a - b) for b in f.alphas) < 1e-6


def test_factor_requires_proven_single_variable_map():
    with pytest.raises(ValueError):
        blaschke_factor(CircleMap(parse_poly("z + 1", Z), parse_poly("z - 1", Z)))
    with pytest.raises(ValueError):
        blaschke_factor(make_circle_map(parse_poly("z1*z2 + 2", ["z1", "z2"])))


def test_circle_root_folds_into_prefactor():
    # p = (z - i)(z - 3): the root i pairs with itself
    cm = make_circle_map(parse_poly("(z - i)*(z - 3)", Z))
    f = blaschke_factor(cm)
    assert len(f.alphas) == 1 and abs(f.alphas[0] - 3) < 1e-9
    zs = np.exp(1j * np.linspace(0.1, 6, 64))
    assert np.allclose(f.eval(zs), cm.eval([zs]))


def test_unit_from_angle_is_exact_unit():
    for phi in np.linspace(-3.14, 3.14, 11):
        u = unit_from_angle(phi)
        assert u.is_unit() and abs(complex(u) - np.exp(1j * phi)) < 1e-9
    assert unit_from_angle(np.pi) == -1


def test_factor_reconstructs_random_maps():
    rng = np.random.default_rng(11)
    zs = np.exp(2j * np.pi * np.arange(64) / 64 + 0.01j)
    for _ in range(30):
        p = random_poly(rng, 1, 6, exp_range=4)
        cm = make_circle_map(p)
        f = blaschke_factor(cm)
        ref = cm.eval([zs])
        assert np.all(np.abs(f.eval(zs) - ref) <= 1e-6 * np.maximum(1, np.abs(ref)))
