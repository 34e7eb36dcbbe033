"""Exception types shared across the package."""


class TorusLocusError(Exception):
    """Base class for all errors raised by this package."""


class VariableCountError(TorusLocusError, ValueError):
    """Operands live in rings with different numbers of variables."""


class ZeroPolynomialError(TorusLocusError, ValueError):
    """An operation that needs a nonzero polynomial received zero."""


class PoleError(TorusLocusError, ZeroDivisionError):
    """Evaluation at a coordinate 0 of a variable with a negative exponent."""


class VerticalComponentError(TorusLocusError, ValueError):
    """A fiber restriction vanished identically."""


class ParseError(TorusLocusError, ValueError):
    """Malformed expression text; carries the 0-based character position."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")

    def pretty(self) -> str:
        if not self.text:
            return str(self)
        return f"{self}\n  {self.text}\n  {' ' * self.position}^"


class RootFindingError(TorusLocusError, ArithmeticError):
    """The root finder did not converge; ``best`` holds the last iterate."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class DegenerateProjectionError(TorusLocusError, ValueError):
    """Every sampled fiber was ramified, or the fiber variable is absent."""


class DegenerateEquationError(TorusLocusError, ValueError):
    """A monomial system whose solution set is the whole torus."""


class ModulusAmbiguityError(TorusLocusError, ValueError):
    """A modulus comparison sits on a boundary and float data cannot settle it."""


class NotExactError(TorusLocusError, TypeError):
    """An exact-only operation received approximate input."""
