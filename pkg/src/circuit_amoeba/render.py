"""Amoeba rasterization and PGM/SVG output."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .core import CircuitPolynomial, normalize
from .errors import DimensionTooLarge, InvalidInput, OrderAmbiguous, QuadratureSingular
from .fiber import EPS_BAND, EPS_ZERO, round_to_order, torus_minimize
from .lopsided import as_sparse, dominant_indices
from .ronkin import ronkin_gradient
from .tropical import pixel_centers

INSIDE, OUTSIDE, BAND = 0, 1, 2
PGM_VALUE = {INSIDE: 0, OUTSIDE: 255, BAND: 128}

COLORS = {
    "amoeba": "#c0392b",
    "band": "#9e9e9e",
    "spine": "#27ae60",
    "tropC": "#1a237e",
    "equilibrium_set": "#e57373",
    "eq_points": "#d50000",
    "region": "#000000",
    "inner_circle": "#2e7d32",
    "outer_circle": "#1565c0",
}


@dataclass(frozen=True)
class RasterGrid:
    window: Tuple[float, float, float, float]
    resolution: int
    status: np.ndarray  # (res, res) uint8; row 0 is the top (largest y)
    order_index: np.ndarray  # (res, res) int; index into ``orders`` or -1
    orders: List[Tuple[int, ...]]

    def cell(self, i: int, j: int) -> str:
        s = int(self.status[i, j])
        if s == OUTSIDE:
            k = int(self.order_index[i, j])
            return f"Outside({self.orders[k] if k >= 0 else '?'})"
        return "Inside" if s == INSIDE else "Band"

    def pixel_of(self, w) -> Tuple[int, int]:
        xmin, xmax, ymin, ymax = self.window
        j = int((w[0] - xmin) / (xmax - xmin) * self.resolution)
        i = int((ymax - w[1]) / (ymax - ymin) * self.resolution)
        return min(max(i, 0), self.resolution - 1), min(max(j, 0), self.resolution - 1)

    def outside_components(self) -> Tuple[np.ndarray, int]:
        return ndimage.label(self.status == OUTSIDE)

    def bounded_components(self) -> List[int]:
        labels, count = self.outside_components()
        border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])))
        return [k for k in range(1, count + 1) if k not in border]

    def unbounded_components(self) -> List[int]:
        labels, count = self.outside_components()
        border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])))
        return [k for k in range(1, count + 1) if k in border]

    def component_orders(self, label: int) -> set:
        labels, _ = self.outside_components()
        idx = self.order_index[labels == label]
        return {self.orders[k] for k in np.unique(idx) if k >= 0}


def default_window(f: CircuitPolynomial) -> Tuple[float, float, float, float]:
    from .equilibrium import equilibrium_point_y, equilibrium_points
    f = normalize(f)
    center = equilibrium_point_y(f)
    half = 3.0
    if f.c != 0:
        pts = equilibrium_points(f)
        spread = max(float(np.linalg.norm(p - q)) for p in pts for q in pts)
        if spread > 1e-9:
            half = 1.5 * spread
    return (center[0] - half, center[0] + half, center[1] - half, center[1] + half)


def _check_window(window, resolution):
    xmin, xmax, ymin, ymax = (float(v) for v in window)
    if not (xmax > xmin and ymax > ymin) or not all(map(math.isfinite, (xmin, xmax, ymin, ymax))):
        raise InvalidInput("window must satisfy xmin < xmax and ymin < ymax")
    if resolution < 16:
        raise InvalidInput("resolution must be at least 16")
    return (xmin, xmax, ymin, ymax)


def raster_amoeba(f, window=None, resolution: int = 256, threads: int = 1,
                  grid: int = 64, order_level: int = 8) -> RasterGrid:
    """Per-pixel three-state membership with complement orders."""
    p = as_sparse(f)
    if p.n != 2:
        raise DimensionTooLarge("rasters need n = 2")
    if window is None:
        window = default_window(f)
    window = _check_window(window, resolution)
    xs, ys = pixel_centers(window, resolution)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    total = len(pts)

    dom = dominant_indices(p, pts)
    status = np.full(total, BAND, dtype=np.uint8)
    status[dom >= 0] = OUTSIDE
    todo = np.nonzero(dom < 0)[0]

    def work(idx):
        _, rel, _ = torus_minimize(p, pts[idx], grid=grid)
        return rel

    blocks = np.array_split(todo, max(1, min(len(todo) // 512 + 1, 64))) if len(todo) else []
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, blocks))
    else:
        results = [work(b) for b in blocks]
    for idx, rel in zip(blocks, results):
        st = np.where(rel < EPS_ZERO, INSIDE, np.where(rel > EPS_BAND, OUTSIDE, BAND))
        status[idx] = st

    orders: List[Tuple[int, ...]] = []
    order_index = np.full(total, -1, dtype=np.int64)

    def order_id(o):
        o = tuple(int(x) for x in o)
        if o not in orders:
            orders.append(o)
        return orders.index(o)

    exps = p.exps
    for t in range(len(exps)):
        mask = dom == t
        if mask.any():
            order_index[mask] = order_id(exps[t])

    status2 = status.reshape(resolution, resolution)
    labels, count = ndimage.label(status2 == OUTSIDE)
    flat = labels.ravel()
    rel_depth = None
    for lab in range(1, count + 1):
        members = np.nonzero(flat == lab)[0]
        known = set(order_index[members][order_index[members] >= 0].tolist())
        unknown = members[order_index[members] < 0]
        if not len(unknown):
            continue
        if len(known) == 1:
            order_index[unknown] = known.pop()
            continue
        if not known:
            # no lopsided pixel: use the Ronkin gradient at the pixel farthest from the amoeba
            if rel_depth is None:
                rel_depth = np.zeros(total)
            rep = members[len(members) // 2]
            try:
                order_index[unknown] = order_id(round_to_order(f, ronkin_gradient(p, pts[rep], level=order_level)))
            except (OrderAmbiguous, QuadratureSingular):
                pass
            continue
        for k in unknown:
            try:
                order_index[k] = order_id(round_to_order(f, ronkin_gradient(p, pts[k], level=order_level)))
            except (OrderAmbiguous, QuadratureSingular):
                pass
    return RasterGrid(window, resolution, status2, order_index.reshape(resolution, resolution), orders)


# ---------------------------------------------------------------------------
# output

def to_pgm(grid: RasterGrid) -> bytes:
    """Binary P5: 0 inside the amoeba, 255 outside, 128 for the numeric band."""
    lut = np.zeros(3, dtype=np.uint8)
    for k, v in PGM_VALUE.items():
        lut[k] = v
    body = lut[grid.status].astype(np.uint8).tobytes()
    header = f"P5\n{grid.resolution} {grid.resolution}\n255\n".encode("ascii")
    return header + body


def read_pgm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise InvalidInput("not a binary PGM")
    w, h = (int(x) for x in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)


class _Canvas:
    def __init__(self, window, size: int):
        self.window = window
        self.size = size
        self.items: List[str] = []

    def xy(self, w) -> Tuple[float, float]:
        xmin, xmax, ymin, ymax = self.window
        return ((w[0] - xmin) / (xmax - xmin) * self.size, (ymax - w[1]) / (ymax - ymin) * self.size)

    def polyline(self, pts, color, width=1.5, cls=""):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in (self.xy(p) for p in pts))
        self.items.append(f'<polyline class="{cls}" points="{coords}" fill="none" stroke="{color}" '
                          f'stroke-width="{width}"/>')

    def dot(self, w, color, r=4.0, cls=""):
        x, y = self.xy(w)
        self.items.append(f'<circle class="{cls}" cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{color}"/>')

    def circle(self, center, radius, color, cls=""):
        x, y = self.xy(center)
        rr = radius / (self.window[1] - self.window[0]) * self.size
        self.items.append(f'<circle class="{cls}" cx="{x:.2f}" cy="{y:.2f}" r="{rr:.2f}" fill="none" '
                          f'stroke="{color}" stroke-width="1.5"/>')

    def svg(self, title: str = "") -> str:
        head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.size}" '
                f'height="{self.size}" viewBox="0 0 {self.size} {self.size}">\n')
        if title:
            head += f"<title>{title}</title>\n"
        bg = f'<rect width="{self.size}" height="{self.size}" fill="#ffffff"/>\n'
        return head + bg + "\n".join(self.items) + "\n</svg>\n"


def _curve_polylines(curve, window, ray_length=None):
    if ray_length is None:
        ray_length = 2 * max(window[1] - window[0], window[3] - window[2])
    lines = []
    for e in curve.edges:
        a = np.array(curve.vertices[e["from"]])
        if "to" in e:
            b = np.array(curve.vertices[e["to"]])
        else:
            d = np.array(e["ray"], dtype=float)
            b = a + ray_length * d / np.linalg.norm(d)
        lines.append([a, b])
    return lines


def render_svg(grid: Optional[RasterGrid], overlays: Optional[Dict] = None, size: int = 512,
               window=None) -> str:
    """Layered SVG: amoeba pixels, then spine, C(f), equilibrium set and points."""
    overlays = overlays or {}
    window = grid.window if grid is not None else window
    if window is None:
        raise InvalidInput("a window is needed without a raster")
    cv = _Canvas(window, size)
    eq = overlays.get("equilibrium_set")
    if eq is not None:
        _pixel_rects(cv, eq.mask, COLORS["equilibrium_set"], "equilibrium-set")
    if grid is not None:
        _pixel_rects(cv, grid.status == INSIDE, COLORS["amoeba"], "amoeba")
        _pixel_rects(cv, grid.status == BAND, COLORS["band"], "band")
    for key, width in (("spine", 2.0), ("tropC", 1.5)):
        curve = overlays.get(key)
        if curve is not None:
            for line in _curve_polylines(curve, window):
                cv.polyline(line, COLORS[key], width, key)
    for p in overlays.get("eq_points", []) or []:
        cv.dot(p, COLORS["eq_points"], 5.0, "eq-point")
    return cv.svg("amoeba")


def _pixel_rects(cv: _Canvas, mask: np.ndarray, color: str, cls: str):
    res = mask.shape[0]
    cell = cv.size / res
    for i in range(res):
        row = mask[i]
        j = 0
        while j < res:
            if row[j]:
                k = j
                while k < res and row[k]:
                    k += 1
                cv.items.append(f'<rect class="{cls}" x="{j * cell:.3f}" y="{i * cell:.3f}" '
                                f'width="{(k - j) * cell:.3f}" height="{cell:.3f}" fill="{color}"/>')
                j = k
            else:
                j += 1


def render_region_svg(geom, samples: int = 720, size: int = 512, c: Optional[complex] = None) -> str:
    """Coefficient-plane picture: region boundary, cusps, circles of radius |Theta| and (n+1)|Theta|."""
    from .barycentric import region_boundary_samples
    half = 1.15 * geom.R
    window = (-half, half, -half, half)
    cv = _Canvas(window, size)
    pts = region_boundary_samples(geom, samples)
    line = [(z.real, z.imag) for z in pts] + [(pts[0].real, pts[0].imag)]
    cv.polyline(line, COLORS["region"], 1.5, "region-boundary")
    cv.circle((0.0, 0.0), geom.r, COLORS["inner_circle"], "inner-circle")
    cv.circle((0.0, 0.0), geom.R, COLORS["outer_circle"], "outer-circle")
    for z in geom.cusps():
        cv.dot((z.real, z.imag), COLORS["region"], 3.5, "cusp")
    if c is not None:
        cv.dot((c.real, c.imag), COLORS["eq_points"], 4.0, "inner-coefficient")
    return cv.svg("solid region in the c-plane")


def render(grid: Optional[RasterGrid], overlays: Optional[Dict] = None, fmt: str = "svg") -> bytes:
    if fmt == "pgm":
        if grid is None:
            raise InvalidInput("PGM output needs a raster")
        return to_pgm(grid)
    if fmt == "svg":
        return render_svg(grid, overlays).encode("utf-8")
    raise InvalidInput(f"unknown format {fmt!r}")
