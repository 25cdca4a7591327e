"""Extremal phases, extreme opposition and the appearance point a(f).

The appearance point is where the inner complement component opens first
while |c| grows along an extreme-opposition ray; its closed form uses the
ratios det Mhat_j / det Mhat.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from . import intlinalg as il
from .core import CircuitPolynomial, CircuitSupport, angular_distance, normalize, support_matrices
from .equilibrium import equilibrium_point_y, theta_abs
from .errors import InnerCoefficientZero

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ExtremalPhaseSet:
    phases: List[np.ndarray]
    extreme_arg_c: List[float]


@dataclass(frozen=True)
class AppearanceData:
    gamma: np.ndarray
    a_point: np.ndarray
    theta_hat_abs: float
    kappa_star: float
    barycentric: bool
    # a(f) is only the first-appearance point on extreme-opposition rays;
    # for other arguments of c it is reported as that reference point
    reference_only: bool = False


def is_barycentric(support: CircuitSupport) -> bool:
    """Exact test sum_j alpha(j) == (n+1) y (shift invariant form)."""
    n = support.n
    total = [sum(a[i] for a in support.alphas) for i in range(n)]
    return all(total[i] == (n + 1) * support.y[i] for i in range(n))


def _solve_congruence(a, t) -> List[np.ndarray]:
    """All u in [0,1)^n with a @ u == t (mod 1), via a Smith form of ``a``."""
    u_mat, d_mat, v_mat = il.smith_normal_form(a)
    n = len(a)
    ut = np.array(u_mat, dtype=float) @ np.asarray(t, dtype=float)
    diag = [d_mat[i][i] for i in range(n)]
    v_f = np.array(v_mat, dtype=float)
    grids = np.meshgrid(*[np.arange(d) for d in diag], indexing="ij")
    ks = np.stack([g.ravel() for g in grids], axis=1)
    vs = (ut[None, :] + ks) / np.array(diag, dtype=float)[None, :]
    us = np.mod(vs @ v_f.T, 1.0)
    us[us > 1 - 1e-15] = 0.0
    return [row for row in us]


def extremal_phases(f: CircuitPolynomial) -> ExtremalPhaseSet:
    """All |det M| torus points where the outer monomials share the argument of b_0."""
    f = normalize(f)
    mt = [list(a) for a in f.support.alphas[1:]]
    t = [-cmath.phase(bi) / TWO_PI for bi in f.b[1:]]
    us = _solve_congruence(mt, t)
    # lexicographic order keeps the output reproducible
    us.sort(key=lambda u: tuple(np.round(u, 12)))
    phases = [TWO_PI * u for u in us]
    y = np.array(f.support.y, dtype=float)
    args: List[float] = []
    for phi in phases:
        val = (math.pi - float(phi @ y)) % TWO_PI
        if not any(angular_distance(val, a) < 1e-9 for a in args):
            args.append(val)
    args.sort()
    return ExtremalPhaseSet(phases, args)


def is_extreme_opposition(f: CircuitPolynomial, tol: float = 1e-9) -> bool:
    f = normalize(f)
    if f.c == 0:
        raise InnerCoefficientZero("extreme opposition needs c != 0")
    arg = cmath.phase(f.c)
    return any(angular_distance(arg, a) <= tol for a in extremal_phases(f).extreme_arg_c)


def nearest_extreme_distance(f: CircuitPolynomial) -> float:
    f = normalize(f)
    arg = cmath.phase(f.c)
    return min(angular_distance(arg, a) for a in extremal_phases(f).extreme_arg_c)


def appearance_point(f: CircuitPolynomial) -> AppearanceData:
    f = normalize(f)
    sm = support_matrices(f)
    ratios = sm.hat_ratios
    assert all(r > 0 for r in ratios), "interior y forces positive det Mhat_j / det Mhat"
    gamma = np.array([math.log(r) for r in (float(x) for x in ratios)])
    log_b = np.log(np.abs(np.array(f.b[1:])))
    a_point = il.solve_integer_system([list(a) for a in f.support.alphas[1:]], gamma - log_b)
    bary = is_barycentric(f.support)
    if bary:
        # exact shortcut: gamma vanishes identically
        gamma = np.zeros(f.n)
        a_point = equilibrium_point_y(f)
        t_hat = theta_abs(f)
        kappa = (f.n + 1) * t_hat
    else:
        weights = [float(w) for w in sm.weights]
        t_hat = math.exp(sum(w * (lb - g) for w, lb, g in zip(weights, log_b, gamma)))
        kappa = t_hat * float(1 + sum(ratios, Fraction(0)))
    reference_only = f.c != 0 and not is_extreme_opposition(f)
    return AppearanceData(gamma, a_point, t_hat, kappa, bary, reference_only)


def kappa_star(f: CircuitPolynomial) -> float:
    return appearance_point(f).kappa_star


def min_outer_sum(f: CircuitPolynomial, s) -> float:
    """g(s) = e^{-<s,y>} + sum_j |b_j| e^{<s, alpha(j) - y>}, the quantity a(f) minimizes."""
    f = normalize(f)
    ex = np.array(f.support.alphas, dtype=float) - np.array(f.support.y, dtype=float)
    return float(np.sum(np.abs(np.array(f.b)) * np.exp(ex @ np.asarray(s, dtype=float))))


def extremal_phase_tuple(f: CircuitPolynomial) -> Tuple[Tuple[float, ...], ...]:
    return tuple(tuple(float(x) for x in p) for p in extremal_phases(f).phases)
