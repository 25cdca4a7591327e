import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circuit_amoeba.core import circuit_polynomial
from circuit_amoeba.errors import DimensionTooLarge, PreconditionFailed, QuadratureSingular
from circuit_amoeba.lopsided import SparsePolynomial
from circuit_amoeba.ronkin import ronkin_gradient, ronkin_value
from circuit_amoeba.tropical import (TropicalPolynomial, complement_induced_curve, equilibrium_set_raster,
                                     pixel_centers, ronkin_coefficient, spine, tropical_curve, tropicalize)

from conftest import deltoid, triangle, random_coeffs, random_support
from helpers import similar_triangles

L4 = math.log(4)
ONE_PLUS_Z = SparsePolynomial.from_dict({(0,): 1, (1,): 1})


def test_tropicalize_full():
    tp = tropicalize(triangle())
    assert sorted(tp.terms) == sorted([(0.0, (0, 0)), (0.0, (2, 1)), (0.0, (1, 2)), (L4, (1, 1))])


def test_complement_induced_genus1_equals_full():
    assert sorted(tropicalize(triangle(), [(0, 0), (2, 1), (1, 2), (1, 1)]).terms) == sorted(tropicalize(triangle()).terms)


def test_solid_curve_single_vertex():
    cv = complement_induced_curve(deltoid(0.5))
    assert len(cv.vertices) == 1 and np.allclose(cv.vertices[0], 0)


def test_triangle_curve_vertex():
    cv = tropical_curve(tropicalize(triangle()))
    assert any(np.allclose(v, [L4, -2 * L4]) for v in cv.vertices)
    assert len(cv.vertices) == 3 and len(cv.bounded_edges()) == 3


def test_maximally_sparse_curve():
    cv = tropical_curve(tropicalize(deltoid(0)))
    assert len(cv.vertices) == 1 and np.allclose(cv.vertices[0], 0)
    rays = sorted(tuple(e["ray"]) for e in cv.edges)
    assert rays == [(-1, 0), (0, -1), (1, 1)]


def test_dual_is_stellar_triangulation():
    cv = tropical_curve(tropicalize(triangle()))
    cells = [set(map(tuple, d)) for d in cv.dual]
    assert all((1, 1) in c for c in cells)
    assert len(cells) == 3


def test_curve_json_shape():
    data = json.loads(json.dumps(tropical_curve(tropicalize(triangle())).to_json()))
    assert set(data) >= {"vertices", "edges", "dual"}
    for e in data["edges"]:
        assert "from" in e and ("to" in e) != ("ray" in e)


def test_curve_requires_n2():
    tp = TropicalPolynomial(((0.0, (0,)), (1.0, (1,))))
    with pytest.raises(DimensionTooLarge):
        tropical_curve(tp)


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_tropical_curve_correctness(seed):
    rng = np.random.default_rng(seed)
    alphas, y = random_support(rng, bound=6)
    f = circuit_polynomial(alphas, y, random_coeffs(rng, 2, spread=2), math.exp(rng.uniform(-1, 3)))
    tp = tropicalize(f)
    cv = tropical_curve(tp)
    for v in cv.vertices:
        assert len(tp.maximizers(v, tol=1e-10)) >= 3
    for i, j in cv.bounded_edges():
        mid = (np.array(cv.vertices[i]) + np.array(cv.vertices[j])) / 2
        assert len(tp.maximizers(mid, tol=1e-9)) == 2
    # random points are off the curve with probability one: unique maximizer
    for w in rng.uniform(-5, 5, (20, 2)):
        assert len(tp.maximizers(w, tol=1e-12)) == 1


def test_equilibrium_raster_contains_curve():
    f = triangle()
    window, res = (-4, 4, -4, 4), 128
    eq = equilibrium_set_raster(f, window, res)
    cv = complement_induced_curve(f)
    xs, ys = pixel_centers(window, res)
    h = 8 / res
    for p in cv.sample_points(per_edge=30, ray_length=2.0):
        if not (-4 < p[0] < 4 and -4 < p[1] < 4):
            continue
        j = min(int((p[0] + 4) / h), res - 1)
        i = min(int((4 - p[1]) / h), res - 1)
        near = eq.mask[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2]
        assert near.any()
    assert len(eq.markers) == 4


def test_equilibrium_raster_symmetric_rays():
    eq = equilibrium_set_raster(deltoid(0), (-2, 2, -2, 2), 64)
    xs, ys = pixel_centers((-2, 2, -2, 2), 64)
    # ray direction (1,1) bisects between x^3 and y^3: diagonal pixels are marked
    for k in range(32, 64):
        assert eq.mask[63 - k, k]


@pytest.mark.parametrize("w", [-2.0, -0.5, 0.7, 2.0])
def test_ronkin_jensen(w):
    est = ronkin_value(ONE_PLUS_Z, w, level=12)
    assert abs(est.value - max(0.0, w)) < 1e-6
    assert est.error_estimate >= 0


def test_ronkin_singular_retry():
    # w = 0 puts the zero of 1+z on the unit circle; the midpoint grid avoids it
    est = ronkin_value(ONE_PLUS_Z, 0.0, level=10)
    assert abs(est.value) < 1e-2


def test_ronkin_gradient_far_vertex():
    g = ronkin_gradient(triangle(), (10, 0))
    assert np.allclose(g, (2, 1), atol=1e-2)


def test_ronkin_coefficients():
    f = triangle()
    assert abs(ronkin_coefficient(f, (0, 0), (-10, -10))) < 1e-6
    beta = ronkin_coefficient(f, (1, 1), (0, 0))
    assert beta == pytest.approx(ronkin_value(f, (0, 0)).value)
    w2 = np.array([0.05, 0.05])
    est = ronkin_value(f, w2)
    assert abs(est.value - beta - w2.sum()) < max(3 * est.error_estimate, 1e-9)
    with pytest.raises(PreconditionFailed):
        ronkin_coefficient(deltoid(0.5), (1, 1), (0, 0))


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6))
def test_ronkin_convexity(seed):
    rng = np.random.default_rng(seed)
    f = triangle(complex(*rng.uniform(-5, 5, 2)))
    a, b = rng.uniform(-2, 2, (2, 2))
    try:
        va, vb, vm = (ronkin_value(f, p, level=7) for p in (a, b, (a + b) / 2))
    except QuadratureSingular:
        return
    err = va.error_estimate + vb.error_estimate + vm.error_estimate
    assert vm.value <= (va.value + vb.value) / 2 + 3 * err + 1e-12


def test_spine_solid_equals_complement_induced():
    f = deltoid(0.5)
    assert spine(f).to_json() == complement_induced_curve(f).to_json()


def test_spine_similar_inner_triangle():
    f = triangle()
    s, c = spine(f), complement_induced_curve(f)
    ok, ratio = similar_triangles(s, c, tol=1e-3)
    assert ok and ratio < 1
    # unbounded rays share directions
    assert sorted(tuple(e["ray"]) for e in s.edges if "ray" in e) == \
        sorted(tuple(e["ray"]) for e in c.edges if "ray" in e)
