"""Exact arithmetic in the Gaussian rationals Q(i)."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["GaussianRational", "as_gaussian"]


class GaussianRational:
    """A number ``re + im*i`` with exact rational parts.

    Instances are immutable and hashable. Arithmetic with ``int`` and
    ``Fraction`` operands is supported; mixing with ``float``/``complex``
    is refused so that exactness cannot leak away silently (use
    :meth:`from_complex` for an explicit exact conversion).
    """

    __slots__ = ("_re", "_im")

    def __init__(self, re=0, im=0):
        self._re = Fraction(re)
        self._im = Fraction(im)

    @property
    def re(self) -> Fraction:
        return self._re

    @property
    def im(self) -> Fraction:
        return self._im

    @classmethod
    def from_complex(cls, z: complex) -> GaussianRational:
        """Exact conversion of a binary float (no rounding)."""
        z = complex(z)
        return cls(Fraction(z.real), Fraction(z.imag))

    def conj(self) -> GaussianRational:
        return GaussianRational(self._re, -self._im)

    def norm(self) -> Fraction:
        """``|c|^2`` as an exact rational."""
        return self._re * self._re + self._im * self._im

    def is_unit(self) -> bool:
        return self.norm() == 1

    def is_zero(self) -> bool:
        return self._re == 0 and self._im == 0

    def is_real(self) -> bool:
        return self._im == 0

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self._re + o._re, self._im + o._im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self._re - o._re, self._im - o._im)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self._re * o._re - self._im * o._im,
            self._re * o._im + self._im * o._re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conj()
        return GaussianRational(num._re / n, num._im / n)

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self._re, -self._im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussianRational(1) / (self ** (-k))
        result = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison / conversion ---------------------------------------------

    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            if isinstance(other, complex | float):
                return complex(self) == other
            return NotImplemented
        return self._re == o._re and self._im == o._im

    def __hash__(self):
        if self._im == 0:
            return hash(self._re)
        return hash((self._re, self._im))

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        return complex(float(self._re), float(self._im))

    def __abs__(self) -> float:
        return abs(complex(self))

    def __repr__(self):
        return f"GaussianRational({self._re!s}, {self._im!s})"

    def __str__(self):
        from .parser import format_coefficient

        return format_coefficient(self)


def _coerce(x) -> GaussianRational | None:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Rational)):
        return GaussianRational(x)
    return None


def as_gaussian(x) -> GaussianRational:
    """Coerce ``int``/``Fraction``/``GaussianRational``; floats are rejected."""
    g = _coerce(x)
    if g is None:
        raise TypeError(f"not an exact Gaussian rational: {x!r}")
    return g
