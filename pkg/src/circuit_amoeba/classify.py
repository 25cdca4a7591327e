"""Genus classification: closed-form bounds first, numerics last."""

from __future__ import annotations

import itertools
import math
from typing import Dict, Optional

import numpy as np

from .appearance import appearance_point, is_barycentric, is_extreme_opposition
from .barycentric import barycentric_genus_test
from .core import MAX_SCAN_DIM, CircuitPolynomial, normalize
from .equilibrium import rough_bounds
from .errors import ExpansionBudgetExceeded, PreconditionFailed
from .fiber import (GENUS1, INDETERMINATE, SOLID, GenusReport, maximally_sparse_membership,
                    membership)
from .lopsided import lopsided_outside_certificate, refined_membership

SCAN_POINTS = 5
SCAN_SPACING = 0.25
EQUALITY_RTOL = 1e-12


def _pt(w) -> tuple:
    return tuple(float(x) for x in w)


def lopsided_scan(f: CircuitPolynomial, center, points: int = SCAN_POINTS,
                  spacing: float = SCAN_SPACING, refine: bool = True) -> Optional[Dict]:
    """Look for a point near ``center`` certified to lie in the inner component."""
    y = tuple(f.support.y)
    offsets = (np.arange(points) - (points - 1) / 2) * spacing
    grid = [np.asarray(center) + np.array(o) for o in itertools.product(offsets, repeat=f.n)]
    # centre first, then outward, so the reported witness is deterministic and central
    grid.sort(key=lambda w: (float(np.sum((w - center) ** 2)), _pt(w)))
    for w in grid:
        if lopsided_outside_certificate(f, w) == y:
            return {"point": _pt(w), "r": 1}
    if refine and f.n <= 2:
        for w in grid:
            try:
                cert = refined_membership(f, w, 2)
            except (ExpansionBudgetExceeded, PreconditionFailed):
                return None
            if cert is not None and cert.order == y:
                return {"point": _pt(w), "r": 2}
    return None


def classify_genus(f: CircuitPolynomial) -> GenusReport:
    """Decide whether the amoeba of f has a bounded complement component.

    The first applicable criterion wins:
      1. c = 0                                    -> solid
      2. |c| <= |Theta|                           -> solid
      3. barycentric support                      -> exact region test
      4. |c| > kappa*, or |c| = kappa* with arg(c) not extreme -> genus 1;
         |c| <= kappa* with arg(c) extreme        -> solid
      5. |c| > (n+1)|Theta|                       -> genus 1
      6. lopsided point with the inner term dominant near a(f) -> genus 1
      7. numeric fiber membership at a(f)
    """
    f = normalize(f)
    n = f.n
    kappa = abs(f.c)
    if f.c == 0:
        v = maximally_sparse_membership(f, appearance_point(f).a_point)
        return GenusReport(SOLID, "maximally-sparse",
                           {"theorem": "maximally sparse circuit amoebas are solid",
                            "inner_coefficient": 0.0,
                            "check_point_status": v.status})
    lo, hi = rough_bounds(f)
    if kappa <= lo:
        return GenusReport(SOLID, "rough-bound",
                           {"theorem": "solid for |c| <= |Theta|", "abs_c": kappa, "theta_abs": lo})
    if is_barycentric(f.support):
        return barycentric_genus_test(f)
    app = appearance_point(f)
    ks = app.kappa_star
    extreme = is_extreme_opposition(f)
    cert = {"abs_c": kappa, "kappa_star": ks, "theta_hat_abs": app.theta_hat_abs,
            "extreme_opposition": extreme, "appearance_point": _pt(app.a_point)}
    equal = abs(kappa - ks) <= EQUALITY_RTOL * ks
    if kappa > ks and not equal:
        return GenusReport(GENUS1, "sharp-bound", dict(cert, theorem="genus 1 for |c| > kappa*"),
                           _pt(app.a_point) if extreme else None)
    if equal and not extreme:
        return GenusReport(GENUS1, "sharp-bound",
                           dict(cert, theorem="solid needs |c| < kappa* off extreme opposition"))
    if extreme:
        return GenusReport(SOLID, "sharp-bound",
                           dict(cert, theorem="extreme opposition: solid up to kappa*"))
    if kappa > hi:
        return GenusReport(GENUS1, "rough-bound",
                           {"theorem": "genus 1 for |c| > (n+1)|Theta|", "abs_c": kappa,
                            "upper_bound": hi})
    if n > MAX_SCAN_DIM:
        return GenusReport(INDETERMINATE, "numeric-fiber",
                           dict(cert, note=f"numeric scans support n <= {MAX_SCAN_DIM}"))
    hit = lopsided_scan(f, app.a_point)
    if hit is not None:
        return GenusReport(GENUS1, "lopsided", dict(cert, theorem="lopsided with dominant inner term",
                                                    **hit), hit["point"])
    v = membership(f, app.a_point)
    cert.update({"membership": v.status, "min_residual": v.min_residual, "scale": v.scale,
                 "order": list(v.order) if v.order is not None else None})
    if v.outside and v.order == tuple(f.support.y):
        return GenusReport(GENUS1, "numeric-fiber", dict(cert, theorem="a(f) lies in the inner component"),
                           _pt(app.a_point))
    if v.inside:
        cert["witness_phi"] = list(v.witness.phi)
        cert["note"] = "numeric: fiber zero at the reference point a(f)"
        return GenusReport(SOLID, "numeric-fiber", cert)
    cert["note"] = "reference point is in the numeric boundary band or outside with a vertex order"
    return GenusReport(INDETERMINATE, "numeric-fiber", cert)


def recheck(f: CircuitPolynomial, report: GenusReport) -> bool:
    """Replay a report's certificate through the module that produced it."""
    f = normalize(f)
    m = report.method
    if m == "maximally-sparse":
        return f.c == 0 and report.verdict == SOLID
    if m == "rough-bound":
        lo, hi = rough_bounds(f)
        if report.verdict == SOLID:
            return abs(f.c) <= lo
        return abs(f.c) > hi
    if m == "barycentric-exact":
        return barycentric_genus_test(f).verdict == report.verdict
    if m == "sharp-bound":
        ks = appearance_point(f).kappa_star
        if report.verdict == SOLID:
            return is_extreme_opposition(f) and abs(f.c) <= ks * (1 + EQUALITY_RTOL)
        return abs(f.c) >= ks * (1 - EQUALITY_RTOL)
    if m == "lopsided":
        w = report.certificate["point"]
        r = report.certificate.get("r", 1)
        if r == 1:
            return lopsided_outside_certificate(f, w) == tuple(f.support.y)
        cert = refined_membership(f, w, r)
        return cert is not None and cert.order == tuple(f.support.y)
    if m == "numeric-fiber":
        if report.verdict == INDETERMINATE:
            return True
        v = membership(f, appearance_point(f).a_point)
        if report.verdict == GENUS1:
            return v.outside and v.order == tuple(f.support.y)
        return v.inside
    return False
