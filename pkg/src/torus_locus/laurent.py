"""Sparse multivariate Laurent polynomials over the Gaussian rationals.

A :class:`LaurentPoly` is an immutable map from integer exponent tuples to
nonzero :class:`~torus_locus.gaussian.GaussianRational` coefficients.  The
star involution conjugates coefficients and inverts every variable; on the
unit torus it agrees with complex conjugation of values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import PoleError, VariableCountError, VerticalComponentError, ZeroPolynomialError
from .gaussian import GaussianRational, as_gaussian

__all__ = [
    "LaurentPoly",
    "Scaling",
    "Associate",
    "FiberPoly",
    "star",
    "normalize",
    "associates",
    "fiber_restrict",
    "univariate_gcd",
    "grlex_key",
]

Exps = tuple[int, ...]


def grlex_key(exps: Exps):
    """Graded-lex sort key: total degree first, ties broken lexicographically."""
    return (sum(exps), exps)


class LaurentPoly:
    __slots__ = ("_n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Sequence[int], object] | None = None):
        if n < 1:
            raise ValueError("a Laurent polynomial needs at least one variable")
        self._n = n
        clean: dict[Exps, GaussianRational] = {}
        for exps, c in (terms or {}).items():
            key = tuple(int(e) for e in exps)
            if len(key) != n:
                raise VariableCountError(f"exponent {key} has length {len(key)}, expected {n}")
            c = as_gaussian(c)
            if key in clean:
                c = clean[key] + c
            if c.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = c
        self._terms = clean
        self._hash = None

    # constructors ---------------------------------------------------------

    @classmethod
    def _raw(cls, n: int, terms: dict[Exps, GaussianRational]) -> LaurentPoly:
        obj = cls.__new__(cls)
        obj._n = n
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, n: int) -> LaurentPoly:
        return cls(n)

    @classmethod
    def constant(cls, c, n: int) -> LaurentPoly:
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, index: int, n: int) -> LaurentPoly:
        e = [0] * n
        e[index] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> LaurentPoly:
        return cls(len(exps), {tuple(exps): c})

    # basic accessors ------------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[Exps, GaussianRational]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def sorted_terms(self, descending: bool = True) -> list[tuple[Exps, GaussianRational]]:
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=descending)

    def leading_term(self) -> tuple[Exps, GaussianRational]:
        if not self._terms:
            raise ZeroPolynomialError("zero polynomial has no leading term")
        e = max(self._terms, key=grlex_key)
        return e, self._terms[e]

    def min_exponents(self) -> Exps:
        if not self._terms:
            raise ZeroPolynomialError("zero polynomial has no support")
        return tuple(min(e[k] for e in self._terms) for k in range(self._n))

    def max_exponents(self) -> Exps:
        if not self._terms:
            raise ZeroPolynomialError("zero polynomial has no support")
        return tuple(max(e[k] for e in self._terms) for k in range(self._n))

    def degree_span(self, var: int) -> int:
        """``max - min`` exponent of one variable (0 when it is absent)."""
        return self.max_exponents()[var] - self.min_exponents()[var]

    def variables_used(self) -> tuple[int, ...]:
        return tuple(k for k in range(self._n) if any(e[k] != 0 for e in self._terms))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def coefficient(self, exps: Sequence[int]) -> GaussianRational:
        return self._terms.get(tuple(exps), GaussianRational(0))

    # ring operations ------------------------------------------------------

    def _check(self, other: LaurentPoly):
        if other._n != self._n:
            raise VariableCountError(f"variable count mismatch: {self._n} vs {other._n}")

    def _lift(self, other) -> LaurentPoly | None:
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        try:
            return LaurentPoly.constant(as_gaussian(other), self._n)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return LaurentPoly._raw(self._n, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self._n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out: dict[Exps, GaussianRational] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return LaurentPoly._raw(self._n, {e: c for e, c in out.items() if not c.is_zero()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial is not a Laurent polynomial")
            (e, c), = self._terms.items()
            return LaurentPoly.monomial([x * k for x in e], c ** k)
        result = LaurentPoly.constant(1, self._n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> LaurentPoly:
        c = as_gaussian(c)
        if c.is_zero():
            return LaurentPoly.zero(self._n)
        return LaurentPoly._raw(self._n, {e: c * v for e, v in self._terms.items()})

    def shift(self, t: Sequence[int]) -> LaurentPoly:
        """Multiply by the monomial ``z^t``."""
        if len(t) != self._n:
            raise VariableCountError("shift vector has wrong length")
        return LaurentPoly._raw(
            self._n, {tuple(a + b for a, b in zip(e, t)): c for e, c in self._terms.items()}
        )

    def star(self) -> LaurentPoly:
        return LaurentPoly._raw(
            self._n, {tuple(-x for x in e): c.conj() for e, c in self._terms.items()}
        )

    def conj_coefficients(self) -> LaurentPoly:
        return LaurentPoly._raw(self._n, {e: c.conj() for e, c in self._terms.items()})

    def embed(self, n: int, positions: Sequence[int]) -> LaurentPoly:
        """Re-home into ``n`` variables; variable ``k`` goes to slot ``positions[k]``."""
        out = {}
        for e, c in self._terms.items():
            ne = [0] * n
            for k, p in enumerate(positions):
                ne[p] = e[k]
            out[tuple(ne)] = c
        return LaurentPoly(n, out)

    def derivative(self, var: int) -> LaurentPoly:
        out = {}
        for e, c in self._terms.items():
            if e[var] != 0:
                ne = list(e)
                ne[var] -= 1
                out[tuple(ne)] = c * e[var]
        return LaurentPoly(self._n, out)

    def split_by(self, var: int) -> dict[int, LaurentPoly]:
        """Coefficients as a polynomial in ``var``: exponent -> remaining part."""
        parts: dict[int, dict[Exps, GaussianRational]] = {}
        for e, c in self._terms.items():
            ne = list(e)
            k = ne[var]
            ne[var] = 0
            parts.setdefault(k, {})[tuple(ne)] = c
        return {k: LaurentPoly._raw(self._n, t) for k, t in sorted(parts.items())}

    # equality -------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._n == other._n and self._terms == other._terms
        try:
            return self == LaurentPoly.constant(as_gaussian(other), self._n)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        from .parser import format_poly

        return f"LaurentPoly({self._n}, {format_poly(self)!r})"

    def __str__(self):
        from .parser import format_poly

        return format_poly(self)

    # numerics -------------------------------------------------------------

    def complex_terms(self) -> tuple[np.ndarray, np.ndarray]:
        """``(exponents[m, n], coefficients[m])`` as numpy arrays."""
        if not self._terms:
            return np.zeros((0, self._n), dtype=np.int64), np.zeros(0, dtype=complex)
        items = self.sorted_terms()
        exps = np.array([e for e, _ in items], dtype=np.int64)
        coeffs = np.array([complex(c) for _, c in items], dtype=complex)
        return exps, coeffs

    def __call__(self, *point):
        return self.eval(point)

    def eval(self, point: Sequence):
        """Evaluate at a point of ``(C^x)^n``; coordinates may be numpy arrays.

        Powers are built by repeated multiplication from a per-variable
        table, so each term costs at most ``|e|_1 + 1`` roundings and the
        absolute error is bounded by roughly
        ``u * sum_k (|e_k|_1 + 2) |c_k| |z^{e_k}|`` with ``u`` the unit
        roundoff.  On the torus that is ``O(terms * degree * ulp)``.
        """
        if len(point) != self._n:
            raise VariableCountError(f"expected {self._n} coordinates, got {len(point)}")
        coords = [np.asarray(x, dtype=complex) for x in point]
        lo = self.min_exponents() if self._terms else (0,) * self._n
        for k, x in enumerate(coords):
            if lo[k] < 0 and np.any(x == 0):
                raise PoleError(f"variable {k} is 0 but occurs with exponent {lo[k]}")
        shape = np.broadcast_shapes(*(x.shape for x in coords)) if coords else ()
        total = np.zeros(shape, dtype=complex)
        cache: dict[tuple[int, int], np.ndarray] = {}

        def power(k: int, e: int):
            key = (k, e)
            if key not in cache:
                if e == 0:
                    cache[key] = np.ones((), dtype=complex)
                elif e > 0:
                    cache[key] = power(k, e - 1) * coords[k]
                else:
                    cache[key] = power(k, e + 1) / coords[k]
            return cache[key]

        for e, c in self.sorted_terms(descending=False):
            term = complex(c)
            for k, ek in enumerate(e):
                if ek:
                    term = term * power(k, ek)
            total = total + term
        return complex(total) if total.ndim == 0 else total

    def coefficient_norm(self) -> float:
        """``sum |c|``: the largest value ``|p|`` can take on the torus."""
        return float(sum(abs(c) for c in self._terms.values()))


def star(p: LaurentPoly) -> LaurentPoly:
    return p.star()


@dataclass(frozen=True)
class Scaling:
    """Record ``p = coeff * z^shift * q`` linking a polynomial to its normal form."""

    coeff: GaussianRational
    shift: Exps

    def apply(self, q: LaurentPoly) -> LaurentPoly:
        return q.shift(self.shift).scale(self.coeff)

    def is_unit(self) -> bool:
        return self.coeff.is_unit()


def normalize(p: LaurentPoly) -> tuple[LaurentPoly, Scaling]:
    """Canonical associate of ``p`` under multiplication by ``c z^t``.

    Every variable is shifted to minimum exponent 0 and the graded-lex
    leading coefficient is scaled to 1.
    """
    if p.is_zero():
        raise ZeroPolynomialError("cannot normalize the zero polynomial")
    lo = p.min_exponents()
    q = p.shift([-x for x in lo])
    _, lc = q.leading_term()
    q = q.scale(GaussianRational(1) / lc)
    return q, Scaling(lc, lo)


@dataclass(frozen=True)
class Associate:
    """Outcome of :func:`associates`; ``kind`` is ``unit``, ``nonunit`` or ``no``."""

    kind: str
    coeff: GaussianRational | None = None
    shift: Exps | None = None

    @property
    def related(self) -> bool:
        return self.kind != "no"

    @property
    def unit(self) -> bool:
        return self.kind == "unit"


def associates(p: LaurentPoly, q: LaurentPoly) -> Associate:
    """Decide whether ``q = c * z^t * p``; the witness satisfies it exactly."""
    if p.is_zero() or q.is_zero():
        raise ZeroPolynomialError("associates() needs nonzero polynomials")
    p._check(q)
    np_, sp = normalize(p)
    nq, sq = normalize(q)
    if np_ != nq:
        return Associate("no")
    c = sq.coeff / sp.coeff
    t = tuple(a - b for a, b in zip(sq.shift, sp.shift))
    return Associate("unit" if c.is_unit() else "nonunit", c, t)


@dataclass(frozen=True)
class FiberPoly:
    """Univariate restriction of a polynomial in ascending coefficient order.

    ``shift`` is the power of the free variable multiplied in to clear
    negative exponents; ``zero_roots`` counts low-order coefficients that
    vanished (roots at 0, excluded from ``coeffs``).
    """

    coeffs: np.ndarray
    shift: int
    zero_roots: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def fiber_restrict(
    p: LaurentPoly, fixed: Sequence[complex], free_index: int, drop_tol: float = 0.0
) -> FiberPoly:
    """Substitute ``fixed`` for every variable except ``free_index``.

    ``fixed`` lists the other coordinates in variable order. Coefficients
    with modulus at most ``drop_tol * max|c|`` at either end are treated as
    zero (the default only drops exact zeros).
    """
    if len(fixed) != p.n - 1:
        raise VariableCountError(f"expected {p.n - 1} fixed coordinates")
    if any(complex(x) == 0 for x in fixed):
        raise PoleError("fixed coordinates must be nonzero")
    parts = p.split_by(free_index)
    if not parts:
        raise VerticalComponentError("restriction of the zero polynomial")
    point = list(fixed)
    point.insert(free_index, 1.0)
    lo, hi = min(parts), max(parts)
    coeffs = np.zeros(hi - lo + 1, dtype=complex)
    for k, part in parts.items():
        coeffs[k - lo] = part.eval(point)
    scale = np.max(np.abs(coeffs))
    if scale == 0:
        raise VerticalComponentError("fiber polynomial vanishes identically")
    small = np.abs(coeffs) <= drop_tol * scale
    nz = np.flatnonzero(~small)
    first, last = nz[0], nz[-1]
    return FiberPoly(coeffs[first : last + 1].copy(), -lo, int(first))


# univariate exact helpers ---------------------------------------------------


def _dense(p: LaurentPoly, var: int) -> tuple[list[GaussianRational], int]:
    """Ascending coefficient list of a polynomial in one variable, plus its valuation."""
    others = [k for k in p.variables_used() if k != var]
    if others:
        raise ValueError(f"polynomial involves variables {others} besides {var}")
    lo = p.min_exponents()[var]
    hi = p.max_exponents()[var]
    out = [GaussianRational(0)] * (hi - lo + 1)
    for e, c in p.terms.items():
        out[e[var] - lo] = c
    return out, lo


def _from_dense(coeffs: Iterable[GaussianRational], var: int, n: int, lo: int = 0) -> LaurentPoly:
    out = {}
    for k, c in enumerate(coeffs):
        e = [0] * n
        e[var] = k + lo
        out[tuple(e)] = c
    return LaurentPoly(n, out)


def _trim(a: list[GaussianRational]) -> list[GaussianRational]:
    while a and a[-1].is_zero():
        a = a[:-1]
    return a


def _poly_rem(a: list[GaussianRational], b: list[GaussianRational]) -> list[GaussianRational]:
    a = _trim(list(a))
    lb = b[-1]
    while len(a) >= len(b):
        f = a[-1] / lb
        off = len(a) - len(b)
        for k, bk in enumerate(b):
            a[off + k] = a[off + k] - f * bk
        a = _trim(a[:-1])
    return a


def poly_divmod(a: list[GaussianRational], b: list[GaussianRational]):
    """Exact long division of ascending coefficient lists."""
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [GaussianRational(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        f = a[-1] / b[-1]
        off = len(a) - len(b)
        q[off] = f
        for k, bk in enumerate(b):
            a[off + k] = a[off + k] - f * bk
        a = _trim(a[:-1])
    return q, a


def univariate_gcd(p: LaurentPoly, q: LaurentPoly, var: int) -> LaurentPoly:
    """Monic gcd of two polynomials in the single variable ``var``.

    Monomial factors are units in the Laurent ring and are discarded, so
    the result has a nonzero constant term.
    """
    if p.is_zero():
        return normalize(q)[0] if not q.is_zero() else q
    if q.is_zero():
        return normalize(p)[0]
    a, _ = _dense(p, var)
    b, _ = _dense(q, var)
    while b:
        a, b = b, _poly_rem(a, b)
    lc = a[-1]
    a = [c / lc for c in a]
    k = 0
    while a[k].is_zero():
        k += 1
    return _from_dense(a[k:], var, p.n)


def exact_quotient(p: LaurentPoly, d: LaurentPoly, var: int) -> LaurentPoly:
    """``p / d`` for univariate Laurent polynomials; raises if inexact."""
    a, lo_a = _dense(p, var)
    b, lo_b = _dense(d, var)
    qt, r = poly_divmod(a, b)
    if r:
        raise ArithmeticError("division is not exact")
    return _from_dense(qt, var, p.n, lo_a - lo_b)


def content_in(p: LaurentPoly, fiber_var: int) -> LaurentPoly:
    """Gcd of the coefficients of ``p`` viewed as a polynomial in ``fiber_var``.

    Only implemented when the coefficients depend on a single other
    variable (plane curves); returns a monic univariate polynomial.
    """
    parts = list(p.split_by(fiber_var).values())
    others = set()
    for part in parts:
        others.update(part.variables_used())
    if len(others) > 1:
        raise NotImplementedError("content over several base variables")
    if not others:
        return LaurentPoly.constant(1, p.n)
    (var,) = others
    g = LaurentPoly.zero(p.n)
    for part in parts:
        g = univariate_gcd(g, part, var) if not g.is_zero() else normalize(part)[0]
        if len(g) == 1:
            break
    return g


def random_poly(rng: np.random.Generator, n: int, max_terms: int, exp_range: int = 6,
                coeff_range: int = 9, denominators: Sequence[int] = (1, 2, 3)) -> LaurentPoly:
    """A random nonzero Laurent polynomial with small Gaussian-rational coefficients."""
    while True:
        m = int(rng.integers(1, max_terms + 1))
        terms = {}
        for _ in range(m):
            e = tuple(int(x) for x in rng.integers(-exp_range, exp_range + 1, size=n))
            d = int(rng.choice(denominators))
            re = Fraction(int(rng.integers(-coeff_range, coeff_range + 1)), d)
            im = Fraction(int(rng.integers(-coeff_range, coeff_range + 1)), d)
            terms[e] = GaussianRational(re, im)
        p = LaurentPoly(n, terms)
        if not p.is_zero():
            return p
