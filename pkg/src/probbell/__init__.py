"""Exact probabilistic r-Stirling numbers and r-Bell polynomials."""

from . import classical, moments, probabilistic, series
from .classical import (
    bell_number,
    bell_poly,
    binomial,
    compositions,
    falling_factorial,
    multinomial,
    partial_bell,
    r_bell_poly,
    r_stirling2,
    spivey_classical_rhs,
    stirling2,
)
from .harness import IDENTITIES, Grid, VerificationReport, mc_check, verify
from .moments import MomentModel, Sampler, joint_moment, moment, parse_dist, sum_moment
from .probabilistic import (
    prob_bell_poly,
    prob_r_bell_poly,
    prob_r_bell_via_partial_bell,
    prob_r_stirling2,
    prob_r_stirling2_egf,
    prob_stirling2,
    recurrence_step,
    spivey_general_rhs,
    spivey_numbers_rhs,
    spivey_poly_rhs,
)
from .series import TruncatedSeries

__version__ = "0.1.0"


def clear_caches() -> None:
    """Drop every memo table (useful before timing a cold computation)."""
    classical.clear_caches()
    moments.clear_caches()
    probabilistic.clear_caches()
