"""Equilibrium points, the coefficient invariant Theta and the rough genus bounds."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Tuple

import numpy as np

from . import intlinalg as il
from .core import CircuitPolynomial, normalize, support_matrices
from .errors import InnerCoefficientZero


@dataclass(frozen=True)
class EquilibriumData:
    eq_y: np.ndarray
    eq_j: Optional[List[np.ndarray]]
    theta_abs: float
    theta_branches: List[complex]


def _m_transpose(f: CircuitPolynomial):
    return [list(a) for a in f.support.alphas[1:]]


def equilibrium_point_y(f: CircuitPolynomial) -> np.ndarray:
    """Point where all outer monomials have norm |b_0| = 1: solves M^t x = -Log|b|."""
    f = normalize(f)
    rhs = -np.log(np.abs(np.array(f.b[1:])))
    return il.solve_integer_system(_m_transpose(f), rhs)


def equilibrium_point_j(f: CircuitPolynomial, j: int) -> np.ndarray:
    """Point where every monomial except the j-th outer one has the same norm."""
    f = normalize(f)
    if f.c == 0:
        raise InnerCoefficientZero("eq(j) is undefined for c = 0")
    n = f.n
    if not 0 <= j <= n:
        raise IndexError(f"j must lie in 0..{n}")
    y = f.support.y
    rows, rhs = [], []
    log_c = math.log(abs(f.c))
    for i in range(n + 1):
        if i == j:
            continue
        a = f.support.alphas[i]
        rows.append([a[k] - y[k] for k in range(n)])
        rhs.append(log_c - math.log(abs(f.b[i])))
    return il.solve_integer_system(rows, rhs)


def equilibrium_points(f: CircuitPolynomial) -> List[np.ndarray]:
    return [equilibrium_point_j(f, j) for j in range(f.n + 1)]


def log_theta_abs(f: CircuitPolynomial) -> float:
    f = normalize(f)
    weights = support_matrices(f).weights
    return float(sum(float(w) * math.log(abs(bi)) for w, bi in zip(weights, f.b[1:])))


def theta_abs(f: CircuitPolynomial) -> float:
    return math.exp(log_theta_abs(f))


def theta(f: CircuitPolynomial) -> Tuple[float, List[complex]]:
    """|Theta| and every value of the multivalued product prod b_i^(det M_i / det M).

    The branches differ by the roots of unity exp(2 pi i sum k_i det M_i / det M);
    these form a cyclic group of order |det M| / gcd(det M_1, ..., det M_n, det M).
    """
    f = normalize(f)
    sm = support_matrices(f)
    log_abs = log_theta_abs(f)
    principal_arg = sum(float(w) * cmath.phase(bi) for w, bi in zip(sm.weights, f.b[1:]))
    d = abs(sm.det_m)
    g = reduce(math.gcd, [abs(x) for x in sm.det_m_j], d)
    count = d // g
    mag = math.exp(log_abs)
    branches = [cmath.rect(mag, principal_arg + 2 * math.pi * k / count) for k in range(count)]
    return mag, branches


def equilibrium_data(f: CircuitPolynomial) -> EquilibriumData:
    f = normalize(f)
    mag, branches = theta(f)
    eq_j = equilibrium_points(f) if f.c != 0 else None
    return EquilibriumData(equilibrium_point_y(f), eq_j, mag, branches)


SOLID = "Solid"
GENUS1 = "Genus1"
INDETERMINATE = "Indeterminate"


def rough_bounds(f: CircuitPolynomial) -> Tuple[float, float]:
    """(|Theta|, (n+1)|Theta|): solid at or below the first, genus 1 above the second."""
    t = theta_abs(f)
    return t, (f.n + 1) * t


def rough_classification(f: CircuitPolynomial) -> str:
    f = normalize(f)
    lo, hi = rough_bounds(f)
    kappa = abs(f.c)
    if kappa <= lo:
        return SOLID
    if kappa > hi:
        return GENUS1
    return INDETERMINATE


def outer_log_norms_about_y(f: CircuitPolynomial, w) -> np.ndarray:
    """log |b_i z^(alpha(i) - y)| on the fiber over w, i = 0..n."""
    f = normalize(f)
    w = np.asarray(w, dtype=float)
    shifted = np.array(f.support.alphas, dtype=float) - np.array(f.support.y, dtype=float)
    return np.log(np.abs(np.array(f.b))) + shifted @ w


def pointwise_lower_bound(f: CircuitPolynomial, w) -> float:
    """Sum of the n-1 largest outer monomial norms at w after dividing by z^y.

    Some inner modulus kappa at least this large puts w on the amoeba of f_kappa.
    """
    f = normalize(f)
    norms = np.sort(np.exp(outer_log_norms_about_y(f, w)))[::-1]
    return float(np.sum(norms[: f.n - 1]))


def barycentric_in_simplex(point, vertices) -> np.ndarray:
    """Affine coordinates of ``point`` w.r.t. n+1 vertices in R^n."""
    v = np.asarray(vertices, dtype=float)
    a = np.vstack([v.T, np.ones(len(v))])
    rhs = np.append(np.asarray(point, dtype=float), 1.0)
    return np.linalg.solve(a, rhs)


def weights_fraction(f: CircuitPolynomial) -> Tuple[Fraction, ...]:
    return support_matrices(normalize(f)).weights
