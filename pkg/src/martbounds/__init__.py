"""Martingale tail and moment bounds in 2-smooth spaces, with exact oracles and Monte Carlo checks."""

__version__ = "0.1.0"

from martbounds.spaces import SpaceSpec, norm, smoothness_constant
from martbounds.tail_bounds import (
    bennett_tail,
    bernstein_tail,
    bounded_increment_tail,
    conditionally_symmetric_tail,
    generic_exponential_tail,
    optimize_lambda,
)
from martbounds.moment_bounds import BoundQuery, check_B, hat_B, spectrum_term, star_B
from martbounds.exact_constants import B_1980, burkholder_C, gamma_jm, rademacher_moment

__all__ = [
    "SpaceSpec",
    "norm",
    "smoothness_constant",
    "bennett_tail",
    "bernstein_tail",
    "bounded_increment_tail",
    "conditionally_symmetric_tail",
    "generic_exponential_tail",
    "optimize_lambda",
    "BoundQuery",
    "check_B",
    "hat_B",
    "spectrum_term",
    "star_B",
    "B_1980",
    "burkholder_C",
    "gamma_jm",
    "rademacher_moment",
]
