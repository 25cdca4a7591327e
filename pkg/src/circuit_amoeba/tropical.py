"""Tropicalizations, plane tropical curves, the equilibrium set and the spine."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import CircuitPolynomial, normalize
from .errors import DimensionTooLarge, PreconditionFailed
from .lopsided import as_sparse, lopsided_outside_certificate
from .ronkin import ronkin_value

TIE_TOL = 1e-10

Exponent = Tuple[int, ...]


@dataclass(frozen=True)
class TropicalPolynomial:
    """Max-plus polynomial: max_t (coef_t + <exp_t, w>)."""

    terms: Tuple[Tuple[float, Exponent], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("tropical polynomial needs at least one term")
        exps = [e for _, e in self.terms]
        if len(set(exps)) != len(exps):
            raise ValueError("tropical exponents must be distinct")

    @property
    def n(self) -> int:
        return len(self.terms[0][1])

    def values(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return np.array([c + float(np.dot(e, w)) for c, e in self.terms])

    def __call__(self, w) -> float:
        return float(np.max(self.values(w)))

    def maximizers(self, w, tol: float = TIE_TOL) -> List[int]:
        v = self.values(w)
        top = float(np.max(v))
        return [i for i, x in enumerate(v) if x >= top - tol * (1 + abs(top))]


def tropicalize(f, orders: Optional[Sequence[Sequence[int]]] = None) -> TropicalPolynomial:
    """Full tropicalization, or the complement-induced one when ``orders`` is given.

    For a circuit polynomial the simplex vertices are always kept; the inner
    exponent is kept only when it is among ``orders``.
    """
    if isinstance(f, CircuitPolynomial):
        f = normalize(f)
        terms = [(math.log(abs(b)), tuple(a)) for b, a in zip(f.b, f.support.alphas)]
        y = tuple(f.support.y)
        keep_y = f.c != 0 and (orders is None or y in {tuple(o) for o in orders})
        if keep_y:
            terms.append((math.log(abs(f.c)), y))
        return TropicalPolynomial(tuple(terms))
    p = as_sparse(f)
    allowed = None if orders is None else {tuple(o) for o in orders}
    terms = [(float(np.log(abs(c))), tuple(int(x) for x in e)) for e, c in zip(p.exps, p.coeffs)
             if allowed is None or tuple(int(x) for x in e) in allowed]
    return TropicalPolynomial(tuple(terms))


@dataclass(frozen=True)
class TropicalCurve:
    vertices: List[Tuple[float, float]]
    edges: List[Dict]  # {"from": i, "to": j} or {"from": i, "ray": (dx, dy)}
    dual: List[List[Exponent]]
    terms: Tuple[Tuple[float, Exponent], ...] = field(default=())

    def to_json(self) -> Dict:
        edges = []
        for e in self.edges:
            if "to" in e:
                edges.append({"from": e["from"], "to": e["to"]})
            else:
                edges.append({"from": e["from"], "ray": [int(x) for x in e["ray"]]})
        return {"vertices": [[float(x), float(y)] for x, y in self.vertices],
                "edges": edges,
                "dual": [[list(e) for e in cell] for cell in self.dual]}

    def bounded_edges(self) -> List[Tuple[int, int]]:
        return [(e["from"], e["to"]) for e in self.edges if "to" in e]

    def sample_points(self, per_edge: int = 20, ray_length: float = 3.0) -> np.ndarray:
        pts = []
        for e in self.edges:
            a = np.array(self.vertices[e["from"]])
            if "to" in e:
                b = np.array(self.vertices[e["to"]])
            else:
                d = np.array(e["ray"], dtype=float)
                b = a + ray_length * d / np.linalg.norm(d)
            for t in np.linspace(0, 1, per_edge):
                pts.append(a + t * (b - a))
        return np.array(pts)


def _frac(x: float) -> Fraction:
    return Fraction(x)


def tropical_curve(tp: TropicalPolynomial, tol: float = TIE_TOL) -> TropicalCurve:
    """Corner locus of a plane tropical polynomial via its bisector arrangement.

    Intersections are solved in exact rational arithmetic on the (binary) float
    coefficients; ties with the global max use a relative tolerance.
    """
    if tp.n != 2:
        raise DimensionTooLarge("tropical curves are computed for n = 2 only")
    coefs = [_frac(c) for c, _ in tp.terms]
    exps = [e for _, e in tp.terms]
    k = len(exps)

    def val(i, w):
        return coefs[i] + exps[i][0] * w[0] + exps[i][1] * w[1]

    def is_top(w, idx):
        vals = [val(i, w) for i in range(k)]
        top = max(vals)
        slack = Fraction(tol) * (1 + abs(top))
        return all(vals[i] >= top - slack for i in idx), [i for i in range(k) if vals[i] >= top - slack]

    vertices: List[Tuple[Fraction, Fraction]] = []
    dual: List[List[int]] = []
    for i, j, l in combinations(range(k), 3):
        # solve val_i = val_j = val_l
        a1 = [exps[i][0] - exps[j][0], exps[i][1] - exps[j][1]]
        a2 = [exps[i][0] - exps[l][0], exps[i][1] - exps[l][1]]
        det = a1[0] * a2[1] - a1[1] * a2[0]
        if det == 0:
            continue
        r1, r2 = coefs[j] - coefs[i], coefs[l] - coefs[i]
        w = ((r1 * a2[1] - r2 * a1[1]) / det, (a1[0] * r2 - a2[0] * r1) / det)
        ok, tops = is_top(w, (i, j, l))
        if not ok:
            continue
        if any(abs(float(w[0] - v[0])) + abs(float(w[1] - v[1])) < 1e-9 for v in vertices):
            continue
        vertices.append(w)
        dual.append(tops)

    def vertex_index(w):
        best = min(range(len(vertices)), key=lambda v: abs(float(w[0] - vertices[v][0])) +
                   abs(float(w[1] - vertices[v][1])))
        return best

    edges: List[Dict] = []
    for i, j in combinations(range(k), 2):
        d_exp = (exps[i][0] - exps[j][0], exps[i][1] - exps[j][1])
        if d_exp == (0, 0):
            continue
        g = math.gcd(abs(d_exp[0]), abs(d_exp[1]))
        direction = (-d_exp[1] // g, d_exp[0] // g)
        # a point on the bisector <d_exp, w> = coef_j - coef_i
        rhs = coefs[j] - coefs[i]
        nn = d_exp[0] ** 2 + d_exp[1] ** 2
        p0 = (rhs * d_exp[0] / nn, rhs * d_exp[1] / nn)
        lo, hi = None, None  # t-interval where i (and j) attain the max
        feasible = True
        for l in range(k):
            if l in (i, j):
                continue
            # val_i(p0 + t d) - val_l(p0 + t d) >= 0
            c0 = val(i, p0) - val(l, p0)
            c1 = (exps[i][0] - exps[l][0]) * direction[0] + (exps[i][1] - exps[l][1]) * direction[1]
            if c1 == 0:
                if c0 < 0:
                    feasible = False
                    break
                continue
            t = -c0 / c1
            if c1 > 0:
                lo = t if lo is None else max(lo, t)
            else:
                hi = t if hi is None else min(hi, t)
        if not feasible or (lo is not None and hi is not None and hi - lo <= Fraction(1, 10**12)):
            continue

        def at(t):
            return (p0[0] + t * direction[0], p0[1] + t * direction[1])

        if lo is not None and hi is not None:
            a, b = vertex_index(at(lo)), vertex_index(at(hi))
            if a != b:
                edges.append({"from": min(a, b), "to": max(a, b), "terms": (i, j)})
        elif lo is not None:
            edges.append({"from": vertex_index(at(lo)), "ray": direction, "terms": (i, j)})
        elif hi is not None:
            edges.append({"from": vertex_index(at(hi)), "ray": (-direction[0], -direction[1]),
                          "terms": (i, j)})
        else:
            # two-term curve: a full line, recorded as two rays from one point
            vertices.append(p0)
            dual.append([i, j])
            v = len(vertices) - 1
            edges.append({"from": v, "ray": direction, "terms": (i, j)})
            edges.append({"from": v, "ray": (-direction[0], -direction[1]), "terms": (i, j)})
    edges.sort(key=lambda e: (e["from"], e.get("to", -1), tuple(e.get("ray", ()))))
    return TropicalCurve([(float(x), float(y)) for x, y in vertices], edges,
                         [sorted(exps[t] for t in cell) for cell in dual], tp.terms)


def curve_to_json(curve: TropicalCurve) -> Dict:
    return curve.to_json()


# ---------------------------------------------------------------------------
# equilibrium set

@dataclass(frozen=True)
class EquilibriumRaster:
    window: Tuple[float, float, float, float]
    resolution: int
    mask: np.ndarray  # (res, res) bool, row index = y from top
    markers: List[np.ndarray]
    band: float


def pixel_centers(window, resolution: int) -> Tuple[np.ndarray, np.ndarray]:
    """Centers of a resolution x resolution grid; rows run from ymax down to ymin."""
    xmin, xmax, ymin, ymax = window
    hx = (xmax - xmin) / resolution
    hy = (ymax - ymin) / resolution
    xs = xmin + hx * (np.arange(resolution) + 0.5)
    ys = ymax - hy * (np.arange(resolution) + 0.5)
    return xs, ys


def equilibrium_set_raster(f, window, resolution: int, band: Optional[float] = None) -> EquilibriumRaster:
    """Pixels where two monomial norms agree up to ``band`` in log units.

    The default band is one pixel diameter times the largest exponent difference,
    so every point of a tie line marks the pixel containing it.
    """
    p = as_sparse(f)
    if p.n != 2:
        raise DimensionTooLarge("equilibrium raster needs n = 2")
    xs, ys = pixel_centers(window, resolution)
    if band is None:
        h = max((window[1] - window[0]), (window[3] - window[2])) / resolution
        diffs = p.exps[:, None, :] - p.exps[None, :, :]
        band = h * float(np.max(np.linalg.norm(diffs, axis=2)))
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    logs = np.log(np.abs(p.coeffs))[None, :] + pts @ p.exps.T
    mask = np.zeros(len(pts), dtype=bool)
    for i, j in combinations(range(len(p.coeffs)), 2):
        mask |= np.abs(logs[:, i] - logs[:, j]) < band
    markers: List[np.ndarray] = []
    if isinstance(f, CircuitPolynomial):
        from .equilibrium import equilibrium_point_y, equilibrium_points
        markers.append(equilibrium_point_y(f))
        if normalize(f).c != 0:
            markers.extend(equilibrium_points(f))
    return EquilibriumRaster(tuple(window), resolution, mask.reshape(resolution, resolution), markers, band)


# ---------------------------------------------------------------------------
# Ronkin coefficients and the spine

def ronkin_coefficient(f, order: Sequence[int], w, level: int = None, check: bool = True) -> float:
    """beta_order = N_f(w) - <order, w> for w in the complement component of that order."""
    from .fiber import membership
    order = tuple(int(x) for x in order)
    w = np.asarray(w, dtype=float)
    if check:
        v = membership(f, w)
        if not v.outside or tuple(v.order) != order:
            raise PreconditionFailed(f"w={w.tolist()} does not lie in the component of order {order}")
    est = ronkin_value(f, w, level)
    beta = est.value - float(np.dot(order, w))
    if isinstance(f, CircuitPolynomial):
        g = normalize(f)
        for b, a in zip(g.b, g.support.alphas):
            if tuple(a) == order:
                exact = math.log(abs(b))
                if abs(beta - exact) > max(1e-6, 10 * est.error_estimate):
                    raise PreconditionFailed(f"vertex coefficient {beta} disagrees with log|b| = {exact}")
    return beta


def inner_component_point(f: CircuitPolynomial, genus_report=None) -> np.ndarray:
    """A point certified to lie in the inner complement component E_y."""
    from .appearance import appearance_point, is_barycentric
    from .equilibrium import equilibrium_point_y
    from .fiber import membership
    f = normalize(f)
    y = tuple(f.support.y)
    candidates = [equilibrium_point_y(f), appearance_point(f).a_point]
    if genus_report is not None and getattr(genus_report, "witness_point", None) is not None:
        candidates.insert(0, np.asarray(genus_report.witness_point))
    for w in candidates:
        if lopsided_outside_certificate(f, w) == y:
            return w
    for w in candidates:
        v = membership(f, w)
        if v.outside and v.order == y:
            return w
    raise PreconditionFailed("no point of the inner complement component was found")


def spine(f: CircuitPolynomial, genus_report=None, level: int = None) -> TropicalCurve:
    """Tropical curve of max over C of (beta_alpha + <alpha, w>) with Ronkin coefficients."""
    from .classify import classify_genus, GENUS1
    f = normalize(f)
    if f.n != 2:
        raise DimensionTooLarge("spines are computed for n = 2 only")
    report = genus_report if genus_report is not None else classify_genus(f)
    terms = [(math.log(abs(b)), tuple(a)) for b, a in zip(f.b, f.support.alphas)]
    if report.verdict == GENUS1:
        w = inner_component_point(f, report)
        y = tuple(f.support.y)
        terms.append((ronkin_coefficient(f, y, w, level, check=False), y))
    elif report.verdict != "Solid":
        raise PreconditionFailed("spine needs a decided genus")
    return tropical_curve(TropicalPolynomial(tuple(terms)))


def complement_induced_curve(f: CircuitPolynomial, genus_report=None) -> TropicalCurve:
    from .classify import classify_genus, GENUS1
    f = normalize(f)
    report = genus_report if genus_report is not None else classify_genus(f)
    orders = [tuple(a) for a in f.support.alphas]
    if report.verdict == GENUS1:
        orders.append(tuple(f.support.y))
    return tropical_curve(tropicalize(f, orders))
