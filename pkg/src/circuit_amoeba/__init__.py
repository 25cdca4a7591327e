"""Genus decisions, invariants and pictures for amoebas of circuit polynomials."""

from .appearance import appearance_point, extremal_phases, is_barycentric, is_extreme_opposition, kappa_star
from .barycentric import barycentric_genus_test, in_region, path_connect, region_geometry
from .classify import classify_genus, recheck
from .core import (CircuitPolynomial, CircuitSupport, circuit_polynomial, load_polynomial, loads_polynomial,
                   normalize, support_matrices)
from .discriminant import discriminant_binomial, in_discriminant, singular_point
from .equilibrium import equilibrium_data, equilibrium_point_j, equilibrium_point_y, rough_bounds, theta_abs
from .errors import *  # noqa: F401,F403
from .fiber import GenusReport, MembershipVerdict, kappa_sweep, membership, order_of_point
from .lopsided import lopsided_outside_certificate, purbhoo_refine, refined_membership
from .render import raster_amoeba, render, render_region_svg, render_svg, to_pgm
from .report import analysis_report, validate_report
from .ronkin import ronkin_gradient, ronkin_value
from .tropical import complement_induced_curve, spine, tropical_curve, tropicalize

__version__ = "0.1.0"
