"""Fiber functions and numeric amoeba membership.

For w in R^n the fiber function is F(phi) = f(e^{w + i phi}).  w lies on the
amoeba iff F has a zero on the torus.  Membership is decided by a uniform
torus grid followed by Gauss-Newton polishing of the best local minima; the
verdict has three states so that points in the numeric band near the
boundary are never forced either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import MAX_SCAN_DIM, CircuitPolynomial, barycentric_of, normalize
from .intlinalg import solve_integer_system
from .errors import (DimensionTooLarge, InnerCoefficientNonzero, OrderAmbiguous,
                     QuadratureSingular)
from .lopsided import as_sparse, lopsided_outside_certificate, norm_sequence
from .ronkin import ronkin_gradient

TWO_PI = 2 * math.pi
EPS_ZERO = 1e-9
EPS_BAND = 1e-6
DEFAULT_GRID = 64
DEFAULT_STARTS = 8
MAX_NEWTON = 60
ORDER_TOL = 0.2

IN_AMOEBA = "InAmoeba"
OUTSIDE = "Outside"
BAND = "BoundaryBand"


@dataclass(frozen=True)
class FiberWitness:
    phi: Tuple[float, ...]
    residual: float


@dataclass(frozen=True)
class MembershipVerdict:
    status: str
    scale: float
    min_residual: float
    witness: Optional[FiberWitness] = None
    order: Optional[Tuple[int, ...]] = None
    method: str = "numeric"

    @property
    def inside(self) -> bool:
        return self.status == IN_AMOEBA

    @property
    def outside(self) -> bool:
        return self.status == OUTSIDE


def fiber_eval(f, w, phi) -> complex:
    p = as_sparse(f)
    w = np.asarray(w, dtype=float).reshape(p.n)
    phi = np.asarray(phi, dtype=float).reshape(p.n)
    return complex(np.sum(p.coeffs * np.exp(p.exps @ w + 1j * (p.exps @ phi))))


def monomial_scale(f, w) -> float:
    seq = norm_sequence(f, w)
    return float(np.sum(np.exp(seq.log_norms)))


@lru_cache(maxsize=16)
def _torus_grid(n: int, m: int) -> np.ndarray:
    axes = [np.arange(m) * (TWO_PI / m)] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([a.ravel() for a in mesh], axis=1)


@lru_cache(maxsize=16)
def _phase_table(exps_key: Tuple[Tuple[int, ...], ...], m: int) -> np.ndarray:
    exps = np.array(exps_key, dtype=float)
    grid = _torus_grid(exps.shape[1], m)
    return np.exp(1j * (exps @ grid.T))  # (T, G)


def _local_minima(vals: np.ndarray, n: int, m: int, k: int) -> np.ndarray:
    """Indices (per row) of the k smallest periodic local minima, padded with
    the smallest remaining grid values."""
    rows = vals.shape[0]
    cube = vals.reshape((rows,) + (m,) * n)
    is_min = np.ones_like(cube, dtype=bool)
    for ax in range(1, n + 1):
        is_min &= cube <= np.roll(cube, 1, axis=ax)
        is_min &= cube <= np.roll(cube, -1, axis=ax)
    is_min = is_min.reshape(rows, -1)
    # prefer local minima; others get pushed back by a large key
    key = np.where(is_min, vals, vals + np.max(vals, axis=1, keepdims=True) + 1.0)
    k = min(k, key.shape[1])
    part = np.argpartition(key, k - 1, axis=1)[:, :k]
    order = np.argsort(np.take_along_axis(key, part, axis=1), axis=1, kind="stable")
    return np.take_along_axis(part, order, axis=1)


def _gauss_newton(coef: np.ndarray, exps: np.ndarray, phi: np.ndarray,
                  iters: int = MAX_NEWTON) -> Tuple[np.ndarray, np.ndarray]:
    """Batch Gauss-Newton on |F|^2; coef (B,T), phi (B,n).  Returns (phi, |F|)."""
    ef = exps.astype(float)
    terms, val = evaluate_rows(coef, ef, phi)
    res = np.abs(val)
    active = np.ones(len(phi), dtype=bool)
    for _ in range(iters):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        jac_c = 1j * (terms[idx] @ ef)  # dF/dphi, (b,n) complex
        jac = np.stack([jac_c.real, jac_c.imag], axis=1)  # (b,2,n)
        r = np.stack([val[idx].real, val[idx].imag], axis=1)[:, :, None]
        step = -(np.linalg.pinv(jac) @ r)[:, :, 0]
        t = np.ones(len(idx))
        cur = res[idx]
        accepted = np.zeros(len(idx), dtype=bool)
        new_phi = phi[idx].copy()
        new_terms = terms[idx].copy()
        new_val = val[idx].copy()
        new_res = cur.copy()
        for _h in range(20):
            todo = ~accepted
            if not todo.any():
                break
            trial = phi[idx][todo] + t[todo, None] * step[todo]
            tt, tv = evaluate_rows(coef[idx][todo], ef, trial)
            tr = np.abs(tv)
            ok = tr < cur[todo]
            sel = np.nonzero(todo)[0][ok]
            new_phi[sel] = trial[ok]
            new_terms[sel] = tt[ok]
            new_val[sel] = tv[ok]
            new_res[sel] = tr[ok]
            accepted[sel] = True
            t[todo] *= 0.5
        phi[idx] = new_phi
        terms[idx] = new_terms
        val[idx] = new_val
        # stop once converged to a root or stalled at a positive minimum
        improved = accepted & (new_res < cur * (1 - 1e-6))
        res[idx] = new_res
        still = improved & (new_res > 1e-15 * np.sum(np.abs(coef[idx]), axis=1))
        active[idx] = still
    return np.mod(phi, TWO_PI), res


def evaluate_rows(coef, ef, ph):
    """Terms and value of F for per-row coefficients; coef (B,T), ph (B,n)."""
    e = np.exp(1j * (ph @ ef.T))
    terms = coef * e
    return terms, np.sum(terms, axis=1)


def _scaled(p, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-point coefficients b_t e^{<w,e_t> - L}, the shift L and the scale sum."""
    logs = np.log(np.abs(p.coeffs))[None, :] + points @ p.exps.T
    top = np.max(logs, axis=1, keepdims=True)
    mod = np.exp(logs - top)
    coef = mod * np.exp(1j * np.angle(p.coeffs))[None, :]
    return coef, top[:, 0], np.sum(mod, axis=1)


def torus_minimize(f, points, grid: int = DEFAULT_GRID, starts: int = DEFAULT_STARTS,
                   chunk: int = 256) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Minimize |F| over the torus for each row of ``points``.

    Returns (phi, relative residual |F|/scale, scale); ties are broken
    by (residual, lexicographic phi) so the result does not depend on chunking.
    """
    p = as_sparse(f)
    n = p.n
    if n > MAX_SCAN_DIM:
        raise DimensionTooLarge(f"torus scans support n <= {MAX_SCAN_DIM}")
    pts = np.asarray(points, dtype=float).reshape(-1, n)
    table = _phase_table(tuple(map(tuple, p.exps.tolist())), grid)
    gpts = _torus_grid(n, grid)
    out_phi = np.zeros((len(pts), n))
    out_res = np.zeros(len(pts))
    out_scale = np.zeros(len(pts))
    step = max(1, chunk if n <= 2 else max(1, chunk // 16))
    for s in range(0, len(pts), step):
        block = pts[s:s + step]
        coef, top, ssum = _scaled(p, block)
        vals = np.abs(coef @ table)
        cand = _local_minima(vals, n, grid, starts)  # (B,k)
        b, k = cand.shape
        phi = gpts[cand.reshape(-1)].reshape(b, k, n).copy()
        res = np.full((b, k), np.inf)
        # polish the best start everywhere, the others only where no zero was found
        phi[:, 0], res[:, 0] = _gauss_newton(coef, p.exps, phi[:, 0].copy())
        res[:, 0] /= ssum
        todo = np.nonzero(res[:, 0] >= EPS_ZERO)[0]
        if len(todo) and k > 1:
            crep = np.repeat(coef[todo], k - 1, axis=0)
            ph, r = _gauss_newton(crep, p.exps, phi[todo, 1:].reshape(-1, n).copy())
            phi[todo, 1:] = ph.reshape(len(todo), k - 1, n)
            res[todo, 1:] = r.reshape(len(todo), k - 1) / ssum[todo, None]
        for i in range(b):
            keys = [tuple(phi[i, j]) for j in range(k)]
            j_best = min(range(k), key=lambda j: (res[i, j], keys[j]))
            out_phi[s + i] = phi[i, j_best]
            out_res[s + i] = res[i, j_best]
        out_scale[s:s + b] = ssum * np.exp(top)
    return out_phi, out_res, out_scale


def classify_residual(rel: float) -> str:
    if rel < EPS_ZERO:
        return IN_AMOEBA
    if rel > EPS_BAND:
        return OUTSIDE
    return BAND


def membership(f, w, grid: int = DEFAULT_GRID, starts: int = DEFAULT_STARTS,
               with_order: bool = True) -> MembershipVerdict:
    """Three-state numeric membership of w in the amoeba of f."""
    p = as_sparse(f)
    w = np.asarray(w, dtype=float).reshape(p.n)
    if p.n > MAX_SCAN_DIM:
        raise DimensionTooLarge(f"torus scans support n <= {MAX_SCAN_DIM}")
    scale = monomial_scale(p, w)
    lop = lopsided_outside_certificate(p, w)
    if lop is not None:
        seq = norm_sequence(p, w)
        norms = np.exp(seq.log_norms)
        gap = float(2 * norms[seq.dominant] - np.sum(norms))
        if gap > EPS_BAND * scale:
            return MembershipVerdict(OUTSIDE, scale, gap, order=lop, method="lopsided")
    phi, rel, _ = torus_minimize(p, w[None, :], grid, starts)
    phi = phi[0]
    residual = abs(fiber_eval(p, w, phi))
    status = classify_residual(residual / scale)
    witness = FiberWitness(tuple(float(x) for x in phi), residual)
    if status == IN_AMOEBA:
        return MembershipVerdict(status, scale, residual, witness)
    order = None
    if status == OUTSIDE and with_order:
        try:
            order = order_of_point(f, w)
        except (OrderAmbiguous, QuadratureSingular):
            order = None
    return MembershipVerdict(status, scale, residual, witness, order)


def _closing_angles(norms: Sequence[float]) -> List[float]:
    """Angles theta_i with sum norms_i e^{i theta_i} = 0 for a non-lopsided list.

    The norms are packed greedily (largest first, into the lightest bin) into
    three groups; no group exceeds half the total, so the group sums form a
    triangle and every member of a group shares its side's direction.
    """
    order = sorted(range(len(norms)), key=lambda i: -norms[i])
    bins = [0.0, 0.0, 0.0]
    member = [0] * len(norms)
    for i in order:
        j = min(range(3), key=lambda b: (bins[b], b))
        bins[j] += norms[i]
        member[i] = j
    a, b, c = bins
    # triangle 0 -> a -> P -> 0 with |P - a| = b, |P| = c
    x = (a * a + c * c - b * b) / (2 * a)
    yv = math.sqrt(max(c * c - x * x, 0.0))
    side = [0.0, math.atan2(yv - 0.0, x - a), math.atan2(-yv, -x)]
    return [side[member[i]] for i in range(len(norms))]


def maximally_sparse_membership(f: CircuitPolynomial, w) -> MembershipVerdict:
    """Exact test for c = 0: outside iff one outer norm beats the rest."""
    f = normalize(f)
    if f.c != 0:
        raise InnerCoefficientNonzero("maximally sparse test needs c = 0")
    w = np.asarray(w, dtype=float).reshape(f.n)
    outer = [tuple(a) for a in f.support.alphas]
    b = np.array(f.b)
    logs = np.log(np.abs(b)) + np.array(outer, dtype=float) @ w
    top = float(np.max(logs))
    norms = np.exp(logs - top)
    scale = float(np.sum(norms) * math.exp(top))
    i = int(np.argmax(norms))
    rest = float(np.sum(norms)) - norms[i]
    if norms[i] > rest:
        gap = (norms[i] - rest) * math.exp(top)
        return MembershipVerdict(OUTSIDE, scale, gap, order=outer[i], method="maximally-sparse")
    # build an explicit torus zero: align the monomial arguments with a closed polygon
    theta = np.array(_closing_angles(list(norms)))
    theta = theta - theta[0]
    target = theta[1:] - np.angle(b[1:])
    phi = np.mod(solve_integer_system([list(a) for a in outer[1:]], target), TWO_PI)
    residual = abs(fiber_eval(f, w, phi))
    witness = FiberWitness(tuple(float(x) for x in phi), residual)
    return MembershipVerdict(IN_AMOEBA, scale, residual, witness, method="maximally-sparse")


def order_of_point(f, w, level: int = None) -> Tuple[int, ...]:
    """Order of the complement component containing w."""
    p = as_sparse(f)
    w = np.asarray(w, dtype=float).reshape(p.n)
    lop = lopsided_outside_certificate(p, w)
    if lop is not None:
        return lop
    grad = ronkin_gradient(p, w, level=level)
    return round_to_order(f, grad)


def round_to_order(f, grad) -> Tuple[int, ...]:
    rounded = tuple(int(round(g)) for g in grad)
    dist = float(np.max(np.abs(np.asarray(grad) - np.array(rounded))))
    if dist > ORDER_TOL:
        raise OrderAmbiguous(f"Ronkin gradient {np.round(grad, 4).tolist()} is not near a lattice point")
    if isinstance(f, CircuitPolynomial):
        if not all(l >= 0 for l in barycentric_of(f.support, rounded)):
            raise OrderAmbiguous(f"rounded gradient {rounded} lies outside the Newton polytope")
    return rounded


@dataclass(frozen=True)
class KappaHit:
    kappa: float
    phi: Tuple[float, ...]
    residual: float
    lower_bound: float


def kappa_sweep(f: CircuitPolynomial, w, arg_c: float, grid: int = 256) -> Optional[KappaHit]:
    """Smallest kappa >= S(w) with w on the amoeba of f with c = kappa e^{i arg_c}.

    On the torus, w is on the amoeba of f_kappa iff the outer part P satisfies
    -P(phi) e^{-i(arg_c + <phi,y>)} = kappa e^{<w,y>}.  The imaginary part of the
    left side is tracked over a fine grid; along its zero curve the real part
    gives every admissible kappa, scanned upward from the pointwise bound.
    """
    from .equilibrium import pointwise_lower_bound
    f = normalize(f)
    n = f.n
    w = np.asarray(w, dtype=float).reshape(n)
    bound = pointwise_lower_bound(f, w)
    outer = np.array(f.support.alphas, dtype=float)
    y = np.array(f.support.y, dtype=float)
    b = np.array(f.b)
    shift = math.exp(float(y @ w))

    def q_of(ph):
        ph = np.atleast_2d(ph)
        pv = np.exp(1j * (ph @ outer.T) + outer @ w) @ b
        return -pv * np.exp(-1j * (arg_c + ph @ y)) / shift

    gpts = _torus_grid(n, grid)
    q = q_of(gpts).reshape((grid,) * n)
    candidates = []
    for ax in range(n):
        q2 = np.roll(q, -1, axis=ax)
        flip = (np.sign(q.imag) != np.sign(q2.imag)) & (q.real > 0) & (q2.real > 0)
        for idx in zip(*np.nonzero(flip)):
            start = gpts[np.ravel_multi_index(idx, (grid,) * n)].copy()
            direction = np.zeros(n)
            direction[ax] = TWO_PI / grid
            lo, hi = 0.0, 1.0
            qlo = q_of(start)[0].imag
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                qm = q_of(start + mid * direction)[0].imag
                if (qm > 0) == (qlo > 0):
                    lo, qlo = mid, qm
                else:
                    hi = mid
            ph = start + 0.5 * (lo + hi) * direction
            candidates.append((float(q_of(ph)[0].real), tuple(np.mod(ph, TWO_PI))))
    candidates.sort()
    for kappa, ph in candidates:
        if kappa < bound - 1e-9:
            continue
        fk = f.with_c(kappa * complex(math.cos(arg_c), math.sin(arg_c)))
        res = abs(fiber_eval(fk, w, ph))
        return KappaHit(kappa, ph, res, bound)
    return None


# ---------------------------------------------------------------------------
# genus reports

SOLID = "Solid"
GENUS1 = "Genus1"
INDETERMINATE = "Indeterminate"

GENUS_LABEL = {SOLID: "0", GENUS1: "1", INDETERMINATE: "?"}


@dataclass(frozen=True)
class GenusReport:
    verdict: str
    method: str
    certificate: dict
    witness_point: Optional[Tuple[float, ...]] = None

    @property
    def genus_label(self) -> str:
        return GENUS_LABEL[self.verdict]

    def summary(self) -> str:
        return f"genus={self.genus_label} method={self.method}"
