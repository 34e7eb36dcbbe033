import math

import numpy as np
import pytest

from torus_locus.density import (
    DensityProbe,
    VarietySpec,
    decide,
    fiber_parity_rate,
    odd_degree_criterion,
    projection_degree,
    real_dimension_estimate,
    replay_witness,
    sample_branches,
    sample_decide,
    self_star_check,
    torus_fiber_roots,
)
from torus_locus.errors import DegenerateProjectionError, VariableCountError, ZeroPolynomialError
from torus_locus.laurent import LaurentPoly, random_poly
from torus_locus.parser import parse_poly

P = parse_poly
CLOSURE = "2*z^2*(w^2+1) - w*(z^2+1)^2"


def V(text, variables=("z", "w")):
    return VarietySpec.hypersurface(P(text, variables))


def test_variety_validation():
    with pytest.raises(ValueError):
        VarietySpec(())
    with pytest.raises(ZeroPolynomialError):
        VarietySpec((LaurentPoly.zero(2),))
    with pytest.raises(VariableCountError):
        VarietySpec((P("z"), P("z", ["z"])))
    with pytest.raises(ValueError):
        DensityProbe(grid_size=8)


def test_self_star_examples():
    r = self_star_check(V("z^2*w - 1"))
    assert r.status == "yes"
    assert r.transcript[0]["coeff"] == "-1" and r.transcript[0]["shift"] == [-2, -1]
    assert self_star_check(V("z + w - 2")).status == "no"
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = random_poly(rng, 2, 4)
        assert self_star_check(VarietySpec.hypersurface(p * p.star())).status == "yes"
    assert r.replay([P("z^2*w - 1")])
    assert not r.replay([P("z^2*w - 2")])


def test_self_star_with_several_generators_is_never_no():
    v = VarietySpec((P("z + w - 2"), P("z - w")))
    assert self_star_check(v).status == "inconclusive"


def test_projection_degrees():
    assert projection_degree(V("w^2 - z^3 + 1"), 0) == 2
    assert projection_degree(V("z^2*w - 1"), 0) == 1
    assert projection_degree(V("w^3 + z*w - 1"), 0) == 3
    with pytest.raises(DegenerateProjectionError):
        projection_degree(V("z - 1"), 0)


def test_odd_degree_criterion():
    r = odd_degree_criterion(V("w*(2+z) - (1+2*z)"))
    assert r.status == "dense" and r.degree == 1
    assert odd_degree_criterion(V("z^2*w - 1")).status == "dense"
    assert odd_degree_criterion(V("z^2*w^2 - 1")).status == "inapplicable"
    assert odd_degree_criterion(V("z + w - 2")).status == "inapplicable"
    # vertical factor z + 1 is refused
    assert odd_degree_criterion(V("(z + 1)*(w - 1)")).status == "inapplicable"


def test_decide_examples():
    v = decide(V("z + w - 2"))
    assert (v.verdict, v.reason) == ("NotDense", "not_self_star")
    v = decide(V("z^2*w - 1"))
    assert v.verdict == "Dense"
    v = decide(V("w*(2+z) - (1+2*z)"))
    assert (v.verdict, v.reason) == ("Dense", "odd_degree")
    v = decide(V(CLOSURE))
    assert (v.verdict, v.reason) == ("Dense", "branch_witness")
    assert 0 < v.certificate.arc.length < v.certificate.witness.grid


def test_exact_point_set_for_self_star_trinomial():
    # w^2 + 3w + 1: self-star, roots of w^2 + 3w + 1 are real and off the circle
    v = decide(V("w^2 + 3*w + 1"))
    assert (v.verdict, v.reason) == ("NotDense", "exact_point_set")
    assert v.certificate.solutions.kind == "empty"


def test_decide_unknown_when_no_arc():
    # self-star quartic in w whose torus fibers have no circle roots: (w-2)(2w-1)(w-3)(3w-1) + z - z
    v = decide(V("(w-2)*(2*w-1)*(w-3)*(3*w-1) + z*w^2 - z*w^2"), grid_size=256, probe_bases=4)
    assert v.verdict in ("NotDense", "Unknown")
    assert v.verdict != "Dense"


def test_branch_witness_replays():
    p = P(CLOSURE)
    w = sample_branches(p, DensityProbe(grid_size=1024))
    arc = w.best_arc()
    pts = w.arc_points(arc)
    assert replay_witness(p, 1, pts)
    # tampering breaks the replay
    bad = [(t, r * 1.001) for t, r in pts]
    assert not replay_witness(p, 1, bad)


def test_closure_curve_fibers_match_parametrization():
    p = P(CLOSURE)
    th = np.linspace(0.1, math.pi / 2 - 0.1, 17)
    x, keep = torus_fiber_roots(p, th)
    assert keep.all()
    c = np.cos(th)
    oracle = np.stack([c ** 2 + 1j * np.sqrt(1 - c ** 4), c ** 2 - 1j * np.sqrt(1 - c ** 4)], axis=1)
    for got, want in zip(x, oracle):
        assert sorted(np.round(got, 9).tolist(), key=lambda z: z.imag) == sorted(np.round(want, 9).tolist(), key=lambda z: z.imag)


def test_local_probe_decides_closure_curve():
    v = sample_decide(V(CLOSURE), DensityProbe(math.pi / 2, math.pi / 8, 256))
    assert v.verdict == "Dense"


def test_real_dimension_estimates():
    w = sample_branches(P("z^2*w - 1"), DensityProbe(grid_size=256))
    assert real_dimension_estimate(w) == 1
    w = sample_branches(P("z + w - 2"), DensityProbe(grid_size=256))
    assert real_dimension_estimate(w) == 0
    assert real_dimension_estimate(None) == 0


def test_parity_rate_for_odd_degree_graph():
    rate, generic = fiber_parity_rate(P("w*(2+z) - (1+2*z)"), samples=256)
    assert generic == 256 and rate == 1.0
    rate, _ = fiber_parity_rate(P("w*(3+z) - (1+2*z)"), samples=256)
    assert rate < 0.5


def test_three_variable_odd_degree():
    p = P("z3*(z1*z2 + 2) - (1 + 2*z1*z2)", ["z1", "z2", "z3"])
    v = decide(VarietySpec.hypersurface(p))
    assert (v.verdict, v.reason) == ("Dense", "odd_degree")


def test_several_generators_are_inconclusive():
    v = decide(VarietySpec((P("z^2*w - 1"), P("z - w"))))
    assert (v.verdict, v.reason) == ("Unknown", "inconclusive")


def test_threaded_probes_agree(monkeypatch):
    text = "z^4*w^4 + 1 + z^2*w^2*(1/3) + z*w^2*(1/5) + z^3*w^2*(1/5)"
    serial = decide(V(text), grid_size=512, probe_bases=8)
    monkeypatch.setenv("TORUS_LOCUS_THREADS", "4")
    threaded = decide(V(text), grid_size=512, probe_bases=8)
    assert (serial.verdict, serial.reason) == (threaded.verdict, threaded.reason)
