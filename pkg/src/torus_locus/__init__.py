"""Unit-torus intersections of complex algebraic curves and hypersurfaces."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateEquationError,
    DegenerateProjectionError,
    ParseError,
    RootFindingError,
    TorusLocusError,
    ZeroPolynomialError,
)
from .gaussian import GaussianRational  # noqa: E402
from .laurent import LaurentPoly, associates, fiber_restrict, normalize, star  # noqa: E402
from .parser import format_poly, parse_poly, parse_rational  # noqa: E402
from .roots import circle_classify, roots, track_branches  # noqa: E402
from .torus import circle_circle, smith_normal_form, snf_enumerate, solve_monomial_eq, solve_trinomial  # noqa: E402
from .density import (  # noqa: E402
    DensityProbe,
    VarietySpec,
    decide,
    odd_degree_criterion,
    projection_degree,
    real_dimension_estimate,
    sample_decide,
    self_star_check,
)
from .blaschke import blaschke_factor, expand_blaschke, make_circle_map, verify_circle_map  # noqa: E402

__all__ = [
    "__version__",
    "TorusLocusError",
    "ParseError",
    "RootFindingError",
    "ZeroPolynomialError",
    "DegenerateEquationError",
    "DegenerateProjectionError",
    "GaussianRational",
    "LaurentPoly",
    "star",
    "normalize",
    "associates",
    "fiber_restrict",
    "parse_poly",
    "parse_rational",
    "format_poly",
    "roots",
    "circle_classify",
    "track_branches",
    "solve_monomial_eq",
    "circle_circle",
    "smith_normal_form",
    "snf_enumerate",
    "solve_trinomial",
    "VarietySpec",
    "DensityProbe",
    "self_star_check",
    "projection_degree",
    "odd_degree_criterion",
    "sample_decide",
    "real_dimension_estimate",
    "decide",
    "make_circle_map",
    "verify_circle_map",
    "blaschke_factor",
    "expand_blaschke",
]
