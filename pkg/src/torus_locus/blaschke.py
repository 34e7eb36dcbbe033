"""Rational maps sending the unit torus to the unit circle.

Every such map is, up to a unit monomial, ``g / star(g)`` with the
denominator cleared into Laurent form. In one variable this splits into
Blaschke factors ``(z - a) / (1 - conj(a) z)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import NotExactError, RootFindingError, ZeroPolynomialError
from .gaussian import GaussianRational
from .laurent import LaurentPoly, associates, exact_quotient, univariate_gcd
from .parser import RationalExpr
from .roots import roots

__all__ = [
    "CircleMap",
    "VerifyResult",
    "BlaschkeFactors",
    "make_circle_map",
    "verify_circle_map",
    "blaschke_factor",
    "expand_blaschke",
    "unit_from_angle",
]

PROVEN, SAMPLED, UNVERIFIED = "proven", "sampled", "unverified"
REFUTE_TOL = 1e-6
MATCH_TOL = 1e-6


@dataclass(frozen=True)
class CircleMap:
    """``numerator / denominator``; when proven, ``denominator = beta z^shift star(numerator)``."""

    numerator: LaurentPoly
    denominator: LaurentPoly
    verified: str = UNVERIFIED
    beta: GaussianRational | None = None
    shift: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ZeroDivisionError("circle map with zero denominator")
        if self.numerator.n != self.denominator.n:
            raise ValueError("numerator and denominator variable counts differ")
        if self.verified == PROVEN:
            a = associates(self.numerator.star(), self.denominator)
            if not a.unit:
                raise ValueError("proven flag without a unit associate witness")

    @property
    def n(self) -> int:
        return self.numerator.n

    def eval(self, point):
        return self.numerator.eval(point) / self.denominator.eval(point)

    def as_rational(self) -> RationalExpr:
        return RationalExpr(self.numerator, self.denominator)


def _shift_to_origin(p: LaurentPoly) -> LaurentPoly:
    return p.shift([-x for x in p.min_exponents()])


def make_circle_map(p: LaurentPoly) -> CircleMap:
    """``p / star(p)`` with both sides shifted to nonnegative exponents, minimum 0."""
    if p.is_zero():
        raise ZeroPolynomialError("cannot build a circle map from the zero polynomial")
    num = _shift_to_origin(p)
    den = _shift_to_origin(num.star())
    a = associates(num.star(), den)
    return CircleMap(num, den, PROVEN, a.coeff, a.shift)


@dataclass(frozen=True)
class VerifyResult:
    status: str  # proven | refuted | unknown
    numerator: LaurentPoly
    denominator: LaurentPoly
    beta: GaussianRational | None = None
    shift: tuple[int, ...] | None = None
    sample: tuple[complex, ...] | None = None
    deviation: float | None = None
    note: str = ""

    def circle_map(self) -> CircleMap:
        if self.status != PROVEN:
            raise ValueError(f"map is {self.status}, not proven")
        return CircleMap(self.numerator, self.denominator, PROVEN, self.beta, self.shift)


def _reduce(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly, bool]:
    """Cancel common factors where possible; the flag says the pair is known coprime."""
    used = set(num.variables_used()) | set(den.variables_used())
    if len(used) <= 1:
        if not used:
            return num, den, True
        (var,) = used
        g = univariate_gcd(num, den, var)
        if len(g) > 1:
            num, den = exact_quotient(num, g, var), exact_quotient(den, g, var)
        return num, den, True
    # monomials are units in the Laurent ring, so only proper common factors matter;
    # several-variable gcds are not attempted
    return num, den, num.is_monomial() or den.is_monomial()


def _torus_samples(n: int, count: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    ang = rng.uniform(0, 2 * math.pi, size=(n, count))
    if n == 1:
        grid = 2 * math.pi * (np.arange(4096) + 0.5) / 4096
        ang = np.concatenate([ang, grid[None, :]], axis=1)
    return [np.exp(1j * a) for a in ang]


def _search_counterexample(num: LaurentPoly, den: LaurentPoly, samples: int, seed: int):
    pts = _torus_samples(num.n, samples, seed)
    nv = np.asarray(num.eval(pts), dtype=complex)
    dv = np.asarray(den.eval(pts), dtype=complex)
    scale = max(den.coefficient_norm(), 1e-300)
    safe = np.abs(dv) > 1e-6 * scale
    if not safe.any():
        return None, 0.0, None
    dev = np.where(safe, np.abs(np.abs(nv) / np.where(safe, np.abs(dv), 1.0) - 1.0), 0.0)
    k = int(np.argmax(dev))
    worst = tuple(complex(p[k]) for p in pts)
    if dev[k] > REFUTE_TOL:
        return worst, float(dev[k]), worst
    return None, float(dev[k]), worst


def verify_circle_map(r: RationalExpr | tuple[LaurentPoly, LaurentPoly], samples: int = 512,
                      seed: int = 0) -> VerifyResult:
    """Decide exactly whether ``r`` maps the torus into the circle.

    ``proven`` comes with ``beta`` and ``shift`` such that
    ``denominator = beta z^shift star(numerator)`` with ``|beta| = 1``;
    ``refuted`` comes with a torus point where ``||r| - 1| > 1e-6``, or,
    for a pair known to be coprime, with the exact failure of the identity
    and the worst sampled point even if its violation is smaller.
    """
    num, den = (r.numerator, r.denominator) if isinstance(r, RationalExpr) else r
    if den.is_zero():
        raise ZeroDivisionError("denominator is identically zero")
    if num.is_zero():
        pt = tuple(1 + 0j for _ in range(den.n))
        return VerifyResult("refuted", num, den, sample=pt, deviation=1.0, note="numerator is zero")
    num, den, coprime = _reduce(num, den)
    a = associates(num.star(), den)
    if a.unit:
        return VerifyResult(PROVEN, num, den, a.coeff, a.shift)
    pt, dev, worst = _search_counterexample(num, den, samples, seed)
    if pt is not None:
        note = "constant modulus differs from 1" if a.related else "denominator is not a unit associate of star(numerator)"
        return VerifyResult("refuted", num, den, sample=pt, deviation=dev, note=note)
    if coprime:
        # for a coprime pair, |r| = 1 on the torus forces num * star(num) = den * star(den),
        # and unique factorisation then makes den a unit multiple of z^t star(num)
        return VerifyResult("refuted", num, den, sample=worst, deviation=dev,
                            note="exact: coprime pair fails the associate identity; violation below the sampling threshold")
    note = "no counterexample found among samples"
    if not coprime:
        note += "; the pair may share a factor in several variables, which is not reduced"
    return VerifyResult("unknown", num, den, deviation=dev, note=note)


@dataclass(frozen=True)
class BlaschkeFactors:
    """``prefactor * z^power * prod (z - a) / (1 - conj(a) z)``."""

    alphas: tuple[complex, ...]
    prefactor: complex
    power: int = 0
    var: int = 0
    den_roots: tuple[complex, ...] = ()

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.prefactor * z ** self.power
        for a in self.alphas:
            out = out * (z - a) / (1 - np.conj(a) * z)
        return out


def unit_from_angle(phi: float, max_den: int = 10**12) -> GaussianRational:
    """An exactly unit-modulus Gaussian rational close to ``exp(i phi)``."""
    phi = math.remainder(phi, 2 * math.pi)
    if abs(abs(phi) - math.pi) < 1e-15:
        return GaussianRational(-1)
    t = Fraction(math.tan(phi / 2)).limit_denominator(max_den)
    d = 1 + t * t
    return GaussianRational((1 - t * t) / d, 2 * t / d)


def _exact(c) -> GaussianRational:
    if isinstance(c, GaussianRational):
        return c
    c = complex(c)
    return GaussianRational(Fraction(c.real), Fraction(c.imag))


def expand_blaschke(alphas: Sequence[complex], prefactor=1, power: int = 0) -> CircleMap:
    """Exact circle map for the given factors.

    Each ``a`` is taken exactly as its binary floating value; a complex
    ``prefactor`` is replaced by a nearby exactly unit-modulus rational.
    """
    if isinstance(prefactor, GaussianRational):
        beta = prefactor
        if not beta.is_unit():
            raise NotExactError("prefactor must have modulus exactly 1")
    else:
        pc = complex(prefactor)
        if abs(abs(pc) - 1) > 1e-9:
            raise ValueError("prefactor must have modulus 1")
        beta = _exact(pc) if pc in (1, -1, 1j, -1j) else unit_from_angle(cmath.phase(pc))
    z = LaurentPoly.variable(0, 1)
    num = LaurentPoly.monomial((power,), beta)
    den = LaurentPoly.constant(1, 1)
    for a in alphas:
        ea = _exact(a)
        num = num * (z - ea)
        den = den * (1 - z.scale(ea.conj()))
    a = associates(num.star(), den)
    return CircleMap(num, den, PROVEN, a.coeff, a.shift)


def _single_var(cm: CircleMap) -> int:
    used = set(cm.numerator.variables_used()) | set(cm.denominator.variables_used())
    if len(used) > 1:
        raise ValueError("Blaschke factorisation needs a map in a single variable")
    return used.pop() if used else 0


def _dense_desc(p: LaurentPoly, var: int) -> tuple[list[complex], int]:
    """Ascending complex coefficients from the lowest exponent, and that exponent."""
    lo = p.min_exponents()[var]
    hi = p.max_exponents()[var]
    out = [0j] * (hi - lo + 1)
    for e, c in p.terms.items():
        out[e[var] - lo] = complex(c)
    return out, lo


def _leading(p: LaurentPoly, var: int) -> complex:
    hi = p.max_exponents()[var]
    return complex(sum((c for e, c in p.terms.items() if e[var] == hi), GaussianRational(0)))


def blaschke_factor(cm: CircleMap) -> BlaschkeFactors:
    """Split a proven one-variable circle map into Blaschke factors.

    Roots on the circle pair with themselves; their factor is the constant
    ``-a`` and is folded into the prefactor.
    """
    if cm.verified != PROVEN:
        raise ValueError("blaschke_factor needs a proven circle map")
    var = _single_var(cm)
    nc, k = _dense_desc(cm.numerator, var)
    dc, j = _dense_desc(cm.denominator, var)
    na = roots(nc).all_roots() if len(nc) > 1 else np.zeros(0, dtype=complex)
    da = roots(dc).all_roots() if len(dc) > 1 else np.zeros(0, dtype=complex)
    # the lowest exponent was shifted out, so neither side has zero roots;
    # z - 1/conj(a) = -(1/conj(a)) (1 - conj(a) z), and a root on the circle
    # pairs with itself into the constant -a, cancelling its -conj(a)
    pre = _leading(cm.numerator, var) / _leading(cm.denominator, var)
    alphas = []
    for a in na:
        if abs(abs(a) - 1) > 1e-9:
            pre *= -np.conj(a)
            alphas.append(complex(a))
    targets = np.array([1 / np.conj(a) for a in na], dtype=complex)
    _match_or_raise(targets, da)
    return BlaschkeFactors(tuple(alphas), complex(pre), k - j, var, tuple(complex(x) for x in da))


def _match_or_raise(targets: np.ndarray, found: np.ndarray) -> None:
    if len(targets) != len(found):
        raise RootFindingError(f"numerator gives {len(targets)} factors but the denominator has {len(found)} roots", found)
    left = list(found)
    worst = 0.0
    for t in targets:
        d = [abs(t - f) / max(1.0, abs(t)) for f in left]
        i = int(np.argmin(d))
        worst = max(worst, d[i])
        left.pop(i)
    if worst > MATCH_TOL:
        raise RootFindingError(f"denominator roots miss 1/conj(alpha) by {worst:.3g}", found)
