"""Shared geometric helpers for tests."""

import numpy as np


def inner_triangle_edges(curve):
    """Map from primitive edge direction (sign-normalized) to length, over bounded edges."""
    out = {}
    for i, j in curve.bounded_edges():
        d = np.subtract(curve.vertices[j], curve.vertices[i])
        length = float(np.linalg.norm(d))
        u = d / length
        if u[0] < -1e-12 or (abs(u[0]) <= 1e-12 and u[1] < 0):
            u = -u
        out[tuple(np.round(u, 9))] = length
    return out


def similar_triangles(c1, c2, tol=1e-3):
    """Equal edge-direction sets and a common length ratio within ``tol``."""
    e1, e2 = inner_triangle_edges(c1), inner_triangle_edges(c2)
    if set(e1) != set(e2) or len(e1) != 3:
        return False, None
    ratios = [e1[k] / e2[k] for k in e1]
    return max(ratios) - min(ratios) <= tol * max(ratios), float(np.mean(ratios))
