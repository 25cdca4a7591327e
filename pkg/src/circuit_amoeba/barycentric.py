"""Exact genus test and coefficient paths for barycentric circuits.

When sum_j alpha(j) = (n+1) y, the amoeba is solid exactly for c in a
hypocycloid-shaped region

    S = { -|Theta| (mu e^{i psi} + e^{i(beta - n psi)}) : mu in [k, n], psi in [0, 2 pi) }

with beta = sum_{j>=1} arg b_j and k = -(n - 1 + (-1)^n).  Its boundary is the
curve mu = n, with n+1 cusps of modulus (n+1)|Theta|.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .appearance import is_barycentric
from .core import CircuitPolynomial, normalize
from .equilibrium import equilibrium_point_y, theta_abs
from .errors import InvalidInput, NotBarycentric, PreconditionFailed, VerificationFailed
from .fiber import GENUS1, INDETERMINATE, SOLID, GenusReport

TWO_PI = 2 * math.pi
PSI_GRID = 1024
BISECTION_STEPS = 60
BOUNDARY_TOL = 1e-9

INSIDE = "Inside"
OUTSIDE = "Outside"
ON_BOUNDARY = "OnBoundary"


@dataclass(frozen=True)
class RegionVerdict:
    status: str
    margin: float
    psi: Optional[float] = None
    mu: Optional[float] = None


@dataclass(frozen=True)
class RegionGeometry:
    n: int
    theta_abs: float
    beta: float
    k_lower: int
    cusp_args: Tuple[float, ...]
    R: float
    r: float

    def point(self, mu, psi):
        """Region parametrization; mu = n traces the boundary."""
        return -self.theta_abs * (mu * np.exp(1j * np.asarray(psi)) +
                                  np.exp(1j * (self.beta - self.n * np.asarray(psi))))

    def cusp_params(self) -> List[float]:
        return [(self.beta + TWO_PI * k) / (self.n + 1) for k in range(self.n + 1)]

    def cusps(self) -> List[complex]:
        return [complex(self.point(self.n, p)) for p in self.cusp_params()]

    def contains(self, c: complex) -> str:
        return in_region(self, c).status


def region_geometry(f: CircuitPolynomial) -> RegionGeometry:
    f = normalize(f)
    if not is_barycentric(f.support):
        raise NotBarycentric("support is not barycentric")
    n = f.n
    t = theta_abs(f)
    beta = float(sum(cmath.phase(b) for b in f.b[1:]))
    k_lower = -(n - 1 + (-1) ** n)
    cusp_args = sorted(((math.pi + (beta + TWO_PI * k) / (n + 1)) % TWO_PI) for k in range(n + 1))
    return RegionGeometry(n, t, beta, k_lower, tuple(cusp_args), (n + 1) * t, t)


def _d_of(geom: RegionGeometry, c: complex, psi):
    psi = np.asarray(psi, dtype=float)
    return (-c - geom.theta_abs * np.exp(1j * (geom.beta - geom.n * psi))) * np.exp(-1j * psi) / geom.theta_abs


def _margin(geom: RegionGeometry, mu: float) -> float:
    upper = geom.n - mu
    if geom.n % 2 == 0:
        return min(mu - geom.k_lower, upper)
    # odd n: the lower end of the mu-range is not a boundary of the region
    return upper if mu >= geom.k_lower - BOUNDARY_TOL else mu - geom.k_lower


def boundary_distance(geom: RegionGeometry, c: complex) -> float:
    """Distance from c to the boundary curve, in units of |Theta|."""
    psis = np.arange(4 * PSI_GRID) * (TWO_PI / (4 * PSI_GRID))
    dist = np.abs(geom.point(geom.n, psis) - c)
    i = int(np.argmin(dist))
    h = TWO_PI / (4 * PSI_GRID)
    res = minimize_scalar(lambda p: float(abs(geom.point(geom.n, p) - c)),
                          bounds=(psis[i] - h, psis[i] + h), method="bounded",
                          options={"xatol": 1e-15})
    return min(float(dist[i]), float(res.fun)) / geom.theta_abs


def in_region(geom: RegionGeometry, c: complex) -> RegionVerdict:
    """Decide c in S by locating the psi where d(psi) is real and checking its range."""
    c = complex(c)
    psis = np.arange(PSI_GRID) * (TWO_PI / PSI_GRID)
    d = _d_of(geom, c, psis)
    im = d.imag
    roots: List[float] = []
    scale = 1.0 + abs(c) / geom.theta_abs
    for i in range(PSI_GRID):
        j = (i + 1) % PSI_GRID
        a, b = psis[i], psis[i] + TWO_PI / PSI_GRID
        fa, fb = im[i], im[j]
        if fa == 0:
            roots.append(a)
            continue
        if fa * fb < 0:
            for _ in range(BISECTION_STEPS):
                m = 0.5 * (a + b)
                fm = float(_d_of(geom, c, m).imag)
                if fm == 0:
                    a = b = m
                    break
                if (fm > 0) == (fa > 0):
                    a, fa = m, fm
                else:
                    b = m
            roots.append(0.5 * (a + b))
    # tangential zeros (double roots) do not change sign; refine local minima of |Im d|
    absim = np.abs(im)
    for i in range(PSI_GRID):
        lo, hi = absim[i - 1], absim[(i + 1) % PSI_GRID]
        if absim[i] <= lo and absim[i] <= hi and absim[i] < 1e-2 * scale:
            h = TWO_PI / PSI_GRID
            res = minimize_scalar(lambda p: abs(float(_d_of(geom, c, p).imag)),
                                  bounds=(psis[i] - h, psis[i] + h), method="bounded",
                                  options={"xatol": 1e-14})
            if res.fun < 1e-10 * scale:
                roots.append(float(res.x))
    best: Optional[RegionVerdict] = None
    for psi in roots:
        mu = float(_d_of(geom, c, psi).real)
        m = _margin(geom, mu)
        if best is None or m > best.margin:
            best = RegionVerdict(INSIDE, m, psi % TWO_PI, mu)
    if best is None:
        return RegionVerdict(OUTSIDE, -math.inf)
    if best.margin > BOUNDARY_TOL:
        # a boundary point may also have an interior parametrization
        status = ON_BOUNDARY if boundary_distance(geom, c) <= BOUNDARY_TOL else INSIDE
    elif best.margin < -BOUNDARY_TOL:
        status = OUTSIDE
    else:
        status = ON_BOUNDARY
    return RegionVerdict(status, best.margin, best.psi, best.mu)


def barycentric_genus_test(f: CircuitPolynomial) -> GenusReport:
    """Genus 1 iff c lies outside the region; boundary cases stay undecided."""
    f = normalize(f)
    geom = region_geometry(f)
    verdict = in_region(geom, f.c)
    cert: Dict = {
        "theorem": "barycentric region test",
        "theta_abs": geom.theta_abs,
        "beta": geom.beta,
        "region_status": verdict.status,
        "margin": verdict.margin if math.isfinite(verdict.margin) else None,
        "psi": verdict.psi,
        "mu": verdict.mu,
    }
    if verdict.status == OUTSIDE:
        eq = equilibrium_point_y(f)
        cert["inner_component_point"] = [float(x) for x in eq]
        return GenusReport(GENUS1, "barycentric-exact", cert, tuple(float(x) for x in eq))
    if verdict.status == INSIDE:
        return GenusReport(SOLID, "barycentric-exact", cert)
    cert["note"] = f"c lies within {BOUNDARY_TOL:g} of the region boundary"
    return GenusReport(INDETERMINATE, "barycentric-exact", cert)


def region_boundary_samples(geom: RegionGeometry, m: int) -> np.ndarray:
    """m boundary points at uniform parameter spacing, cusps included exactly."""
    if m < 3 * (geom.n + 1):
        raise InvalidInput(f"need at least {3 * (geom.n + 1)} samples")
    psi0 = geom.beta / (geom.n + 1)
    psis = psi0 + np.arange(m) * (TWO_PI / m)
    if m % (geom.n + 1):
        for cp in geom.cusp_params():
            i = int(np.argmin(np.abs(((psis - cp + math.pi) % TWO_PI) - math.pi)))
            psis[i] = cp
    return geom.point(geom.n, psis)


# ---------------------------------------------------------------------------
# coefficient paths

@dataclass
class CoefficientPath:
    segments: List[np.ndarray]  # each (m, n+2): b_0..b_n then c
    stage_labels: List[str]
    kappa: float
    verdicts: List[List[str]] = field(default_factory=list)

    def points(self) -> np.ndarray:
        return np.vstack(self.segments) if self.segments else np.zeros((0, 0), dtype=complex)

    def sample_count(self) -> int:
        return sum(len(s) for s in self.segments)

    def to_json(self) -> Dict:
        from .core import complex_to_json
        return {
            "kappa": self.kappa,
            "stages": [
                {"label": lab,
                 "points": [[complex_to_json(z) for z in row] for row in seg],
                 "verdicts": ver}
                for lab, seg, ver in zip(self.stage_labels, self.segments, self.verdicts)
            ],
        }


def _min_outer_sum(moduli: np.ndarray, shifted: np.ndarray, start: np.ndarray) -> float:
    """min_w sum_i moduli_i e^{<w, shifted_i>} by damped Newton (convex in w)."""
    w = start.copy()
    logm = np.log(moduli)

    def parts(w):
        e = np.exp(logm + shifted @ w)
        return float(np.sum(e)), shifted.T @ e, (shifted.T * e) @ shifted

    val, g, h = parts(w)
    for _ in range(100):
        if np.max(np.abs(g)) < 1e-10 * max(val, 1.0):
            break
        step = np.linalg.solve(h, -g)
        t = 1.0
        while t > 1e-12:
            nv = parts(w + t * step)
            if nv[0] <= val:
                break
            t *= 0.5
        w = w + t * step
        val, g, h = nv if t > 1e-12 else (val, g, h)
        if t <= 1e-12:
            break
    return val


def lopsided_radius(a: CircuitPolynomial, b: CircuitPolynomial, samples: int = 64) -> float:
    """1 + max over the segment of min_w sum of outer norms relative to z^y.

    Both the complex segment and the interpolation of moduli are scanned, since the
    path moves moduli linearly; the larger value is used.
    """
    a, b = normalize(a), normalize(b)
    shifted = np.array(a.support.alphas, dtype=float) - np.array(a.support.y, dtype=float)
    ba, bb = np.array(a.b), np.array(b.b)
    start = equilibrium_point_y(a) - equilibrium_point_y(a)

    def inner(mu: float) -> float:
        seg = np.abs((1 - mu) * ba + mu * bb)
        mods = (1 - mu) * np.abs(ba) + mu * np.abs(bb)
        best = 0.0
        for m in (seg, mods):
            if np.any(m <= 0):
                return math.inf
            best = max(best, _min_outer_sum(m, shifted, start))
        return best

    mus = np.linspace(0.0, 1.0, samples)
    vals = np.array([inner(m) for m in mus])
    i = int(np.argmax(vals))
    lo, hi = mus[max(i - 1, 0)], mus[min(i + 1, samples - 1)]
    res = minimize_scalar(lambda m: -inner(m), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    return 1.0 + max(float(vals[i]), -float(res.fun))


def _is_genus1(f: CircuitPolynomial) -> str:
    return barycentric_genus_test(f).verdict


def _route_inner(base: CircuitPolynomial, c_from: complex, c_to: complex, steps: int) -> np.ndarray:
    """Inner-coefficient route avoiding the region of ``base``'s outer coefficients."""
    geom = region_geometry(base)
    line = c_from + (c_to - c_from) * np.linspace(0, 1, steps)
    if all(in_region(geom, c).status == OUTSIDE for c in line[:: max(1, steps // 25)]):
        return line
    rho = max(geom.R * (1 + 1e-3), abs(c_from), abs(c_to))
    a0, a1 = cmath.phase(c_from), cmath.phase(c_to)
    da = (a1 - a0 + math.pi) % TWO_PI - math.pi
    third = max(steps // 3, 2)
    out = np.linspace(abs(c_from), rho, third) * np.exp(1j * a0)
    arc = rho * np.exp(1j * (a0 + da * np.linspace(0, 1, third)))
    back = np.linspace(rho, abs(c_to), steps - 2 * third + 2) * np.exp(1j * a1)
    return np.concatenate([out, arc[1:], back[1:]])


def _stage_rows(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    return np.hstack([outer, inner[:, None]])


def path_connect(a: CircuitPolynomial, b: CircuitPolynomial, steps: int = 100,
                 retries: int = 3) -> CoefficientPath:
    """Genus-1 path from a to b through lopsided coefficient configurations."""
    a, b = normalize(a), normalize(b)
    if a.support != b.support:
        raise InvalidInput("both polynomials must share one support")
    if not is_barycentric(a.support):
        raise NotBarycentric("path construction needs a barycentric support")
    for name, g in (("a", a), ("b", b)):
        if _is_genus1(g) != GENUS1:
            raise PreconditionFailed(f"{name} does not have a genus-1 amoeba")
    if a == b:
        row = np.array([list(a.b) + [a.c]])
        return CoefficientPath([row], ["point"], 0.0, [[GENUS1]])
    steps = max(int(steps), 100)
    kappa = lopsided_radius(a, b)
    last_error = None
    for _attempt in range(retries + 1):
        try:
            return _build_path(a, b, kappa, steps)
        except VerificationFailed as exc:
            last_error = exc
            kappa *= 1.5
    raise last_error


def _build_path(a: CircuitPolynomial, b: CircuitPolynomial, kappa: float, steps: int) -> CoefficientPath:
    ba, bb = np.array(a.b), np.array(b.b)
    ca_p = kappa * cmath.exp(1j * cmath.phase(a.c))
    cb_p = kappa * cmath.exp(1j * cmath.phase(b.c))
    t = np.linspace(0.0, 1.0, steps)

    # gamma_1: move c_a to modulus kappa outside the region
    inner1 = _route_inner(a, a.c, ca_p, steps)
    s1 = _stage_rows(np.tile(ba, (len(inner1), 1)), inner1)

    # gamma_3: rotate every argument at fixed moduli
    outer_from = np.angle(ba)
    d_outer = (np.angle(bb) - outer_from + math.pi) % TWO_PI - math.pi
    d_inner = (cmath.phase(cb_p) - cmath.phase(ca_p) + math.pi) % TWO_PI - math.pi
    outer3 = np.abs(ba)[None, :] * np.exp(1j * (outer_from[None, :] + t[:, None] * d_outer[None, :]))
    inner3 = kappa * np.exp(1j * (cmath.phase(ca_p) + t * d_inner))
    outer3[:, 0] = 1.0
    s3 = _stage_rows(outer3, inner3)

    # gamma_4: interpolate outer moduli at the target arguments
    mods = (1 - t)[:, None] * np.abs(ba)[None, :] + t[:, None] * np.abs(bb)[None, :]
    outer4 = mods * np.exp(1j * np.angle(bb))[None, :]
    outer4[:, 0] = 1.0
    s4 = _stage_rows(outer4, np.full(steps, cb_p))

    # gamma_2: mirror of gamma_1 into b
    inner2 = _route_inner(b, cb_p, b.c, steps)
    s2 = _stage_rows(np.tile(bb, (len(inner2), 1)), inner2)

    segments = [s1, s3, s4, s2]
    labels = ["gamma1", "gamma3", "gamma4", "gamma2"]
    # pin endpoints so consecutive stages meet exactly
    s1[0] = np.append(ba, a.c)
    s1[-1] = np.append(ba, ca_p)
    s3[0] = s1[-1]
    s4[-1] = np.append(bb, cb_p)
    s3[-1] = s4[0]
    s2[0] = s4[-1]
    s2[-1] = np.append(bb, b.c)
    verdicts: List[List[str]] = []
    for label, seg in zip(labels, segments):
        stage_v = []
        for idx, row in enumerate(seg):
            g = CircuitPolynomial(a.support, tuple(row[:-1]), row[-1])
            v = _is_genus1(g)
            if v != GENUS1:
                raise VerificationFailed(label, idx, f"(verdict {v})")
            stage_v.append(v)
        verdicts.append(stage_v)
    return CoefficientPath(segments, labels, kappa, verdicts)
