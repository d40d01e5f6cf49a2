"""Adelic energies of canonical measures of rational maps over Q."""

__version__ = "0.1.0"

from .errors import AdelicError
from .exact import ARCHIMEDEAN, Place, factorize, log_abs, valuation
from .heights import AlgebraicOrbit, arakelov_height, canonical_height, naive_height
from .local_energy import SphereQuadrature, pullback_energy_global
from .maps import INFINITY, RationalMap, chebyshev, conjugate_power_map, iterate, lattes, normalize, polynomial_map
from .norms import az_pairing, norm_enclosure, norm_monte_carlo, norm_report, norm_small_points
from .parser import parse_map
from .polynomials import IntegerPolynomial, resultant

__all__ = [
    "ARCHIMEDEAN",
    "INFINITY",
    "AdelicError",
    "AlgebraicOrbit",
    "IntegerPolynomial",
    "Place",
    "RationalMap",
    "SphereQuadrature",
    "arakelov_height",
    "az_pairing",
    "canonical_height",
    "chebyshev",
    "conjugate_power_map",
    "factorize",
    "iterate",
    "lattes",
    "log_abs",
    "naive_height",
    "norm_enclosure",
    "norm_monte_carlo",
    "norm_report",
    "norm_small_points",
    "normalize",
    "parse_map",
    "polynomial_map",
    "pullback_energy_global",
    "resultant",
    "valuation",
]
