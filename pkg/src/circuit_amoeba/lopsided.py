"""Lopsidedness certificates and the rotation-product refinement of f.

A list of moduli is lopsided when one entry beats the sum of the others; if
the monomial norms of f at w are lopsided, w lies outside the amoeba and the
order of its complement component is the dominant exponent.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .core import CircuitPolynomial, barycentric_of
from .errors import ExpansionBudgetExceeded, InvalidInput, PreconditionFailed

Exponent = Tuple[int, ...]

DROP_RELATIVE = 1e-13
DEFAULT_MAX_R = 3
DEFAULT_MAX_N = 2
DEFAULT_MAX_TERMS = 100_000


@dataclass(frozen=True)
class SparsePolynomial:
    """General sparse Laurent polynomial; keys are unique, no zero coefficients."""

    exps: np.ndarray   # (T, n) int64
    coeffs: np.ndarray  # (T,) complex

    @property
    def n(self) -> int:
        return self.exps.shape[1]

    def __len__(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_dict(cls, terms: Dict[Exponent, complex]) -> "SparsePolynomial":
        items = sorted((k, v) for k, v in terms.items() if v != 0)
        if not items:
            raise InvalidInput("polynomial has no terms")
        exps = np.array([k for k, _ in items], dtype=np.int64)
        coeffs = np.array([v for _, v in items], dtype=complex)
        return cls(exps, coeffs)

    @classmethod
    def from_circuit(cls, f: CircuitPolynomial) -> "SparsePolynomial":
        exps = f.exponents()
        coeffs = f.coefficients()
        keep = coeffs != 0
        return cls(exps[keep], coeffs[keep])

    def terms(self) -> Dict[Exponent, complex]:
        return {tuple(int(x) for x in e): complex(c) for e, c in zip(self.exps, self.coeffs)}

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        return complex(np.sum(self.coeffs * np.prod(z ** self.exps, axis=1)))


# expansions are returned as plain sparse polynomials
ExpandedPolynomial = SparsePolynomial


def as_sparse(f) -> SparsePolynomial:
    if isinstance(f, SparsePolynomial):
        return f
    if isinstance(f, CircuitPolynomial):
        return SparsePolynomial.from_circuit(f)
    if isinstance(f, dict):
        return SparsePolynomial.from_dict(f)
    raise TypeError(f"cannot interpret {type(f).__name__} as a sparse polynomial")


@dataclass(frozen=True)
class NormSequence:
    log_norms: np.ndarray
    dominant: Optional[int]

    @property
    def norms(self) -> np.ndarray:
        return np.exp(self.log_norms)

    @property
    def lopsided(self) -> bool:
        return self.dominant is not None


def dominant_index(log_norms: np.ndarray) -> Optional[int]:
    """Index of the entry exceeding the sum of the others, computed in log space."""
    i = int(np.argmax(log_norms))
    top = log_norms[i]
    if not np.isfinite(top):
        return None
    rel = np.exp(log_norms - top)
    rest = float(np.sum(rel)) - 1.0
    return i if rest < 1.0 else None


def norm_sequence(f, w) -> NormSequence:
    p = as_sparse(f)
    w = np.asarray(w, dtype=float).reshape(p.n)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(p.coeffs)) + p.exps @ w
    return NormSequence(logs, dominant_index(logs))


def norm_sequence_from_values(norms: Sequence[float]) -> NormSequence:
    with np.errstate(divide="ignore"):
        logs = np.log(np.asarray(norms, dtype=float))
    return NormSequence(logs, dominant_index(logs))


def lopsided_outside_certificate(f, w) -> Optional[Exponent]:
    p = as_sparse(f)
    seq = norm_sequence(p, w)
    if seq.dominant is None:
        return None
    return tuple(int(x) for x in p.exps[seq.dominant])


def dominant_indices(f, points) -> np.ndarray:
    """Vectorized lopsided test: dominant term index per row of ``points``, or -1."""
    p = as_sparse(f)
    pts = np.asarray(points, dtype=float).reshape(-1, p.n)
    logs = np.log(np.abs(p.coeffs))[None, :] + pts @ p.exps.T
    top = np.max(logs, axis=1, keepdims=True)
    rest = np.sum(np.exp(logs - top), axis=1) - 1.0
    idx = np.argmax(logs, axis=1)
    return np.where(rest < 1.0, idx, -1)


def in_torus_orbit(f, g, rtol: float = 1e-15) -> bool:
    """g is obtained from f by changing coefficient arguments only."""
    p, q = as_sparse(f), as_sparse(g)
    if p.exps.shape != q.exps.shape or not np.array_equal(p.exps, q.exps):
        return False
    a, b = np.abs(p.coeffs), np.abs(q.coeffs)
    return bool(np.all(np.abs(a - b) <= rtol * np.maximum(a, b) * 4))


def torus_invariance_check(f, w, others: Optional[Iterable] = None, samples: int = 25,
                           seed: int = 0) -> bool:
    """Check that the norm sequence at w is the same for every phase rotation of f.

    ``others`` may supply explicit members of the torus orbit; inputs that change a
    coefficient modulus are rejected.  Without them ``samples`` random rotations
    are drawn.
    """
    p = as_sparse(f)
    base = norm_sequence(p, w)
    if base.dominant is None:
        raise PreconditionFailed("norm sequence at w is not lopsided")
    if others is None:
        rng = np.random.default_rng(seed)
        others = [SparsePolynomial(p.exps, p.coeffs * np.exp(1j * rng.uniform(0, 2 * math.pi, len(p))))
                  for _ in range(samples)]
    for g in others:
        q = as_sparse(g)
        if not in_torus_orbit(p, q):
            raise InvalidInput("polynomial is not a coefficient-phase rotation of f")
        seq = norm_sequence(q, w)
        if seq.dominant != base.dominant:
            return False
        if not np.allclose(seq.log_norms, base.log_norms, rtol=0, atol=1e-14 * (1 + np.max(np.abs(base.log_norms)))):
            return False
    return True


def _multiply(a: Dict[Exponent, complex], b: Dict[Exponent, complex]) -> Dict[Exponent, complex]:
    out: Dict[Exponent, complex] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0j) + ca * cb
    return out


def _clean(terms: Dict[Exponent, complex]) -> Dict[Exponent, complex]:
    if not terms:
        return terms
    big = max(abs(v) for v in terms.values())
    return {k: v for k, v in terms.items() if abs(v) > DROP_RELATIVE * big}


def purbhoo_refine(f, r: int, max_r: int = DEFAULT_MAX_R, max_n: int = DEFAULT_MAX_N,
                   max_terms: int = DEFAULT_MAX_TERMS) -> SparsePolynomial:
    """Product of f(zeta^k1 z1, ..., zeta^kn zn) over k in {0..r-1}^n, zeta = e^{2 pi i / r}.

    The product has the same amoeba as f, and its lopsided region shrinks towards it
    as r grows.
    """
    p = as_sparse(f)
    return _refine_cached(tuple(sorted(p.terms().items())), int(r), max_r, max_n, max_terms)


@lru_cache(maxsize=32)
def _refine_cached(items, r, max_r, max_n, max_terms) -> SparsePolynomial:
    base = dict(items)
    n = len(next(iter(base)))
    if r < 1:
        raise InvalidInput("r must be a positive integer")
    if r == 1:
        return SparsePolynomial.from_dict(base)
    if r > max_r or n > max_n:
        raise ExpansionBudgetExceeded(f"r={r}, n={n} exceeds the budget r<={max_r}, n<={max_n}")
    acc: Dict[Exponent, complex] = {(0,) * n: 1 + 0j}
    for k in itertools.product(range(r), repeat=n):
        rotated = {e: c * np.exp(2j * math.pi * sum(ki * ei for ki, ei in zip(k, e)) / r)
                   for e, c in base.items()}
        if len(acc) * len(rotated) > max_terms:
            raise ExpansionBudgetExceeded(f"expansion would exceed {max_terms} intermediate terms")
        acc = _clean(_multiply(acc, rotated))
    return SparsePolynomial.from_dict(acc)


@dataclass(frozen=True)
class RefinedCertificate:
    order: Exponent
    r: int
    dominant_exponent: Exponent


def refined_membership(f, w, r: int, **budget) -> Optional[RefinedCertificate]:
    """Certify w outside the amoeba using lopsidedness of the r-th rotation product."""
    p = as_sparse(f)
    q = purbhoo_refine(p, r, **budget)
    seq = norm_sequence(q, w)
    if seq.dominant is None:
        return None
    dom = tuple(int(x) for x in q.exps[seq.dominant])
    scale = r ** p.n
    if any(x % scale for x in dom):
        raise PreconditionFailed(f"dominant exponent {dom} is not divisible by r^n={scale}")
    order = tuple(x // scale for x in dom)
    if isinstance(f, CircuitPolynomial) and not all(l >= 0 for l in barycentric_of(f.support, order)):
        raise PreconditionFailed(f"recovered order {order} lies outside the Newton polytope")
    return RefinedCertificate(order, r, dom)


def lopsided_grid_mask(f, points, r: int = 1, **budget) -> np.ndarray:
    """Boolean mask of lopsided points of the r-th rotation product."""
    q = purbhoo_refine(as_sparse(f), r, **budget)
    return dominant_indices(q, points) >= 0
