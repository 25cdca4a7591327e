import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circuit_amoeba.appearance import appearance_point, is_barycentric
from circuit_amoeba.barycentric import barycentric_genus_test
from circuit_amoeba.classify import classify_genus, recheck
from circuit_amoeba.core import circuit_polynomial
from circuit_amoeba.equilibrium import equilibrium_point_y, rough_bounds, theta_abs
from circuit_amoeba.errors import DimensionTooLarge, InnerCoefficientNonzero
from circuit_amoeba.fiber import (BAND, GENUS1, IN_AMOEBA, INDETERMINATE, OUTSIDE, SOLID, fiber_eval,
                                  kappa_sweep, maximally_sparse_membership, membership, monomial_scale,
                                  order_of_point, torus_minimize)

from conftest import deltoid, triangle, random_coeffs, random_support, skew


def brute_min(f, w, m=512):
    """Minimum of |F[w,f]| over an m x m torus grid (independent oracle)."""
    t = np.linspace(0, 2 * math.pi, m, endpoint=False)
    p1, p2 = np.meshgrid(t, t, indexing="ij")
    total = np.zeros_like(p1, dtype=complex)
    for coef, e in zip(list(f.b) + [f.c], list(f.support.alphas) + [f.support.y]):
        total += coef * math.exp(float(np.dot(w, e))) * np.exp(1j * (e[0] * p1 + e[1] * p2))
    return float(np.min(np.abs(total)))


def test_fiber_eval_examples():
    assert fiber_eval(triangle(), (0, 0), (0, 0)) == pytest.approx(-1)
    assert abs(fiber_eval(deltoid(-3), (0, 0), (0, 0))) < 1e-15
    assert fiber_eval(deltoid(0), (0, 0), (2 * math.pi / 3, math.pi / 3)) == pytest.approx(1)


def test_membership_triangle_origin():
    v = membership(triangle(), (0, 0))
    assert v.status == OUTSIDE and v.order == (1, 1)


def test_membership_deltoid_half_inside():
    v = membership(deltoid(0.5), (0, 0))
    assert v.status == IN_AMOEBA
    assert brute_min(deltoid(0.5), (0, 0)) < 0.05 * monomial_scale(deltoid(0.5), (0, 0))
    # the witness re-evaluates to its stored residual
    r = abs(fiber_eval(deltoid(0.5), (0, 0), v.witness.phi))
    assert abs(r - v.witness.residual) < 1e-14


def test_membership_far_vertex_order():
    v = membership(triangle(), (10, 0))
    assert v.status == OUTSIDE and v.order == (2, 1)


def test_membership_rejects_high_dimension():
    f = circuit_polynomial([(0, 0, 0, 0), (5, 0, 0, 0), (0, 5, 0, 0), (0, 0, 5, 0), (0, 0, 0, 5)],
                           (1, 1, 1, 1), (1,) * 5, 0.1)
    with pytest.raises(DimensionTooLarge):
        membership(f, (0, 0, 0, 0))


def test_maximally_sparse_examples():
    f = deltoid(0)
    assert maximally_sparse_membership(f, (0, 0)).status == IN_AMOEBA
    v = maximally_sparse_membership(f, (10, 0))
    assert v.status == OUTSIDE and v.order == (3, 0)
    v = maximally_sparse_membership(f, (-10, -10))
    assert v.status == OUTSIDE and v.order == (0, 0)
    with pytest.raises(InnerCoefficientNonzero):
        maximally_sparse_membership(deltoid(1), (0, 0))


def test_maximally_sparse_witness_is_a_zero():
    f = circuit_polynomial([(0, 0), (5, 1), (2, 7)], (2, 3), (1, 0.8j, -1.3), 0)
    v = maximally_sparse_membership(f, equilibrium_point_y(f))
    assert v.status == IN_AMOEBA
    assert abs(fiber_eval(f, equilibrium_point_y(f), v.witness.phi)) < 1e-12


def test_order_of_point_examples():
    assert order_of_point(triangle(), (0, 0)) == (1, 1)
    assert order_of_point(triangle(), (10, 0)) == (2, 1)
    assert order_of_point(deltoid(-4), (-10, -10)) == (0, 0)


def test_order_of_point_ronkin_path():
    # outside the amoeba but not lopsided: the order comes from the Ronkin gradient
    from circuit_amoeba.lopsided import lopsided_outside_certificate
    f = triangle(4 * cmath.exp(0.5j))
    w = (-0.4, 1.6)
    assert lopsided_outside_certificate(f, w) is None
    assert brute_min(f, w) > 0.1
    v = membership(f, w)
    assert v.status == OUTSIDE and v.order == (1, 2)
    assert order_of_point(f, w) == (1, 2)


def test_torus_minimize_deterministic():
    pts = np.random.default_rng(0).uniform(-2, 2, (50, 2))
    a = torus_minimize(deltoid(-2.5), pts)
    b = torus_minimize(deltoid(-2.5), pts[::-1])
    assert np.array_equal(a[1], b[1][::-1])


def test_classify_examples():
    r = classify_genus(triangle())
    assert (r.verdict, r.method) == (GENUS1, "barycentric-exact")
    assert r.summary() == "genus=1 method=barycentric-exact"
    r = classify_genus(deltoid(0.5))
    assert (r.verdict, r.method) == (SOLID, "rough-bound")
    r = classify_genus(deltoid(2.5))
    assert (r.verdict, r.method) == (GENUS1, "barycentric-exact")
    assert brute_min(deltoid(2.5), (0, 0)) > 0.1
    assert classify_genus(deltoid(0)).method == "maximally-sparse"
    assert classify_genus(deltoid(-3)).verdict == INDETERMINATE


def test_classify_sharp_bound_branch():
    r = classify_genus(skew(3.0))
    assert (r.verdict, r.method) == (GENUS1, "sharp-bound")
    r = classify_genus(skew(2.0))  # arg 0 is extreme for this support, below kappa*
    assert (r.verdict, r.method) == (SOLID, "sharp-bound")
    assert recheck(skew(2.0), r)


def test_classify_non_extreme_numeric():
    f = skew(2 * cmath.exp(0.3j))
    r = classify_genus(f)
    assert r.verdict == GENUS1 and r.method in ("lopsided", "numeric-fiber")
    # independent oracle: a(f) is off the amoeba by a clear margin
    a = appearance_point(f).a_point
    assert brute_min(f, a) > 1e-3
    assert recheck(f, r)


def test_sharp_bound_solid_extension_numeric():
    # at extreme opposition and |c| just below kappa*, the appearance point is still on the amoeba
    f = skew(0.99 * 2 * math.sqrt(2))
    assert brute_min(f, appearance_point(f).a_point, m=256) < 1e-2


def test_bound_numeric_consistency():
    # |c| > (n+1)|Theta|: analytic slack lower-bounds the fiber minimum at eq(y)
    for c in (3.5, 4.0 * cmath.exp(1j), 6j):
        f = deltoid(c)
        th = theta_abs(f)
        slack = (abs(c) / th - 3) * th
        assert brute_min(f, (0, 0), m=256) >= slack - 1e-9


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_cascade_coherence(seed):
    rng = np.random.default_rng(seed)
    alphas, y = random_support(rng, bound=6, barycentric=True)
    b = random_coeffs(rng, 2)
    f0 = circuit_polynomial(alphas, y, b, 0)
    lo, hi = rough_bounds(f0)
    c = cmath.rect(rng.uniform(0, 1.3 * hi), rng.uniform(0, 2 * math.pi))
    f = f0.with_c(c)
    exact = barycentric_genus_test(f).verdict
    if abs(c) <= lo:
        assert exact == SOLID
    if abs(c) > hi:
        assert exact == GENUS1
    assert classify_genus(f).verdict == exact or c == 0


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_maximally_sparse_numeric_agreement(seed):
    rng = np.random.default_rng(seed)
    alphas, y = random_support(rng, bound=6)
    f = circuit_polynomial(alphas, y, random_coeffs(rng, 2), 0)
    for w in rng.uniform(-3, 3, (25, 2)) + equilibrium_point_y(f):
        exact = maximally_sparse_membership(f, w)
        num = membership(f, w, with_order=False)
        if num.status != BAND:
            assert num.status == exact.status


def test_kappa_sweep_finds_zero():
    f = deltoid(1)
    hit = kappa_sweep(f, (0.5, -0.3), 1.0)
    assert hit is not None and hit.residual < 1e-8
    assert hit.kappa >= hit.lower_bound - 1e-9
    g = f.with_c(hit.kappa * cmath.exp(1j))
    assert abs(fiber_eval(g, (0.5, -0.3), hit.phi)) < 1e-8 * monomial_scale(g, (0.5, -0.3))
