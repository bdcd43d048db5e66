"""Benjamin-Feir spectra of periodic waves for nonlocal dispersive equations.

    u_t + M(D) u_x + (u^2)_x = 0
"""

from .asymptotics import eigenvalue_branches, figure8_curve, max_growth_rate, mu_critical
from .dsl import parse, symbol_from_expression
from .floquet import assemble, compare_asymptotics, eigs_near_zero, riesz_projector
from .modulation import classify, compute_coefficients
from .stability_map import kawahara_critical_slopes, scan1d, scan2d, whitham_threshold
from .stokes import second_order_expansion, solve_newton
from .symbols import make_catalog_symbol

__version__ = "0.1.0"

__all__ = [
    "make_catalog_symbol",
    "symbol_from_expression",
    "parse",
    "second_order_expansion",
    "solve_newton",
    "compute_coefficients",
    "classify",
    "mu_critical",
    "eigenvalue_branches",
    "figure8_curve",
    "max_growth_rate",
    "assemble",
    "eigs_near_zero",
    "riesz_projector",
    "compare_asymptotics",
    "whitham_threshold",
    "kawahara_critical_slopes",
    "scan1d",
    "scan2d",
]
