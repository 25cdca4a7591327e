"""Ronkin function N_f(w): the torus average of log|f| over the fiber above w."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLarge, QuadratureSingular
from .lopsided import as_sparse

DEFAULT_LEVEL = {1: 12, 2: 8, 3: 6}
MAX_DIM = 3
SINGULAR_RTOL = 1e-14


@dataclass(frozen=True)
class RonkinEstimate:
    value: float
    quadrature_points: int
    error_estimate: float


def default_level(n: int) -> int:
    return DEFAULT_LEVEL.get(n, 6)


def _midpoint_average(p, w, level: int, offset=None) -> float:
    n = p.n
    m = 2 ** level
    if offset is None:
        offset = np.full(n, math.pi / m)
    nodes = [np.arange(m) * (2 * math.pi / m) + offset[k] for k in range(n)]
    # log norms shifted by the max keep exp() in range for large |w|
    logs = np.log(np.abs(p.coeffs)) + p.exps @ w
    top = float(np.max(logs))
    coef = np.exp(logs - top) * np.exp(1j * np.angle(p.coeffs))
    # separable phase factors per axis: e^{i e_tk phi_k}
    vals = np.zeros((m,) * n, dtype=complex)
    for t in range(len(coef)):
        term = np.array(coef[t], dtype=complex)
        for k in range(n):
            shape = [1] * n
            shape[k] = m
            term = term * np.exp(1j * p.exps[t, k] * nodes[k]).reshape(shape)
        vals = vals + term
    absval = np.abs(vals)
    scale = float(np.sum(np.abs(coef)))
    if float(np.min(absval)) < SINGULAR_RTOL * scale:
        raise QuadratureSingular("fiber function vanishes at a quadrature node")
    # pairwise summation (numpy) keeps the reduction deterministic
    return top + float(np.mean(np.log(absval)))


def _average_with_retry(p, w, level, rng_seed):
    try:
        return _midpoint_average(p, w, level)
    except QuadratureSingular:
        rng = np.random.default_rng(rng_seed)
        offset = rng.uniform(0, 2 * math.pi / 2 ** level, p.n)
        return _midpoint_average(p, w, level, offset)


def ronkin_value(f, w, level: int = None, seed: int = 12345) -> RonkinEstimate:
    """Midpoint rule with 2^level nodes per axis; error estimate from level-1."""
    p = as_sparse(f)
    if p.n > MAX_DIM:
        raise DimensionTooLarge(f"Ronkin quadrature supports n <= {MAX_DIM}")
    if level is None:
        level = default_level(p.n)
    level = max(int(level), 2)
    w = np.asarray(w, dtype=float).reshape(p.n)
    fine = _average_with_retry(p, w, level, seed)
    coarse = _average_with_retry(p, w, level - 1, seed + 1)
    return RonkinEstimate(fine, (2 ** level) ** p.n, abs(fine - coarse))


def ronkin_gradient(f, w, h: float = 1e-3, level: int = None) -> np.ndarray:
    """Central differences of N_f; equals the order on complement components."""
    p = as_sparse(f)
    w = np.asarray(w, dtype=float).reshape(p.n)
    grad = np.zeros(p.n)
    for k in range(p.n):
        e = np.zeros(p.n)
        e[k] = h
        grad[k] = (ronkin_value(p, w + e, level).value - ronkin_value(p, w - e, level).value) / (2 * h)
    return grad
