import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circuit_amoeba.appearance import extremal_phases, kappa_star
from circuit_amoeba.barycentric import (INSIDE, ON_BOUNDARY, OUTSIDE, barycentric_genus_test, in_region,
                                        path_connect, region_boundary_samples, region_geometry)
from circuit_amoeba.core import angular_distance, circuit_polynomial
from circuit_amoeba.equilibrium import theta_abs
from circuit_amoeba.errors import NotBarycentric
from circuit_amoeba.fiber import GENUS1, INDETERMINATE, SOLID

from conftest import deltoid, triangle, tall, random_coeffs, random_support, skew


def image_of_fiber(f, m=256):
    """Values -P(phi) e^{-i<y,phi>} at eq(y) = 0 for all-unit |b|: c is in the region iff it is hit."""
    t = np.linspace(0, 2 * math.pi, m, endpoint=False)
    p1, p2 = np.meshgrid(t, t, indexing="ij")
    total = np.zeros_like(p1, dtype=complex)
    for b, a in zip(f.b, f.support.alphas):
        total += b * np.exp(1j * (a[0] * p1 + a[1] * p2))
    y = f.support.y
    return (-total * np.exp(-1j * (y[0] * p1 + y[1] * p2))).ravel()


def test_deltoid_geometry():
    g = region_geometry(deltoid(1))
    assert sorted(g.cusp_args) == pytest.approx([math.pi / 3, math.pi, 5 * math.pi / 3])
    assert (g.R, g.r, g.k_lower) == pytest.approx((3.0, 1.0, -2))
    assert region_geometry(triangle()) == g


def test_tall_geometry_rotated():
    g = region_geometry(tall(1))
    beta = cmath.phase(2.4) + cmath.phase(1 + 1.3j)
    assert g.beta == pytest.approx(beta)
    assert g.theta_abs == pytest.approx(1.5789, abs=1e-3)
    # cusps are those of the deltoid rotated by beta / 3
    base = [math.pi / 3, math.pi, 5 * math.pi / 3]
    for a in g.cusp_args:
        assert min(angular_distance(a, b + beta / 3) for b in base) < 1e-12


def test_not_barycentric():
    with pytest.raises(NotBarycentric):
        region_geometry(skew(1))


@pytest.mark.parametrize("c, status", [(0, INSIDE), (-4, OUTSIDE), (2.5, OUTSIDE), (0.5, INSIDE),
                                       (-3, ON_BOUNDARY), (1, ON_BOUNDARY), (-2.999, INSIDE),
                                       (3 * cmath.exp(1j * math.pi / 3), ON_BOUNDARY)])
def test_in_region_examples(c, status):
    assert in_region(region_geometry(deltoid(1)), c).status == status


def test_in_region_matches_brute_force_examples():
    img = image_of_fiber(deltoid(1), m=512)
    assert np.min(np.abs(img - 0.5)) < 0.05
    assert np.min(np.abs(img - 2.5)) > 1.0


def test_genus_test_examples():
    r = barycentric_genus_test(triangle())
    assert r.verdict == GENUS1 and r.witness_point == (0.0, 0.0)
    assert barycentric_genus_test(deltoid(0)).verdict == SOLID
    assert barycentric_genus_test(deltoid(-3)).verdict == INDETERMINATE


def test_boundary_samples_deltoid():
    g = region_geometry(deltoid(1))
    pts = region_boundary_samples(g, 720)
    assert len(pts) == 720
    mod = np.abs(pts)
    assert mod.max() == pytest.approx(3.0, abs=1e-12) and mod.min() == pytest.approx(1.0, abs=1e-4)
    # the three cusps appear exactly
    for z in g.cusps():
        assert np.min(np.abs(pts - z)) < 1e-12
    # F(2, 0) and F(2, pi/3) by hand, up to the sign convention of the region
    assert np.min(np.abs(np.abs(pts) - 1)) < 1e-4


def test_symmetry_beta_zero():
    g = region_geometry(deltoid(1))
    pts = region_boundary_samples(g, 720)
    rot = pts * cmath.exp(2j * math.pi / 3)
    d = np.min(np.abs(rot[:, None] - pts[None, :]), axis=1)
    assert d.max() < 1e-9


def test_exact_vs_numeric_grid():
    f = deltoid(1)
    g = region_geometry(f)
    img = image_of_fiber(f, m=256)
    xs = np.linspace(-4, 4, 64)
    cell = xs[1] - xs[0]
    pts = region_boundary_samples(g, 4000)
    checked = 0
    for x in xs:
        for yv in xs:
            c = complex(x, yv)
            if np.min(np.abs(pts - c)) <= cell:
                continue
            hit = np.min(np.abs(img - c)) < 0.5 * cell
            assert (in_region(g, c).status == INSIDE) == hit
            checked += 1
    assert checked > 3000


@settings(max_examples=500)
@given(st.integers(0, 10 ** 7))
def test_region_bounds_consistency(seed):
    rng = np.random.default_rng(seed)
    alphas, y = random_support(rng, n=int(rng.integers(2, 4)), bound=6, barycentric=True)
    f = circuit_polynomial(alphas, y, random_coeffs(rng, len(y), spread=1.5), 0)
    g = region_geometry(f)
    th = g.theta_abs
    c = cmath.rect(th * rng.choice([rng.uniform(0, 1), rng.uniform(len(y) + 1, 3 * (len(y) + 1))]),
                   rng.uniform(0, 2 * math.pi))
    st_ = in_region(g, c).status
    if abs(c) < th * (1 - 1e-9):
        assert st_ == INSIDE
    elif abs(c) > g.R * (1 + 1e-9):
        assert st_ == OUTSIDE


@settings(max_examples=100)
@given(st.integers(0, 10 ** 7))
def test_cusps_match_extreme_args_and_kappa(seed):
    rng = np.random.default_rng(seed)
    alphas, y = random_support(rng, n=int(rng.integers(2, 4)), bound=6, barycentric=True)
    f = circuit_polynomial(alphas, y, random_coeffs(rng, len(y), spread=1.5), 1)
    g = region_geometry(f)
    ext = extremal_phases(f).extreme_arg_c
    assert len(ext) == len(g.cusp_args)
    for a in g.cusp_args:
        assert min(angular_distance(a, e) for e in ext) < 1e-10
    assert abs(g.R - kappa_star(f)) < 1e-12 * g.R
    for z in g.cusps():
        assert in_region(g, z).status == ON_BOUNDARY


def _check_path(p, a, b):
    pts = p.points()
    ca = np.array(list(a.b) + [a.c])
    cb = np.array(list(b.b) + [b.c])
    assert np.allclose(pts[0], ca) and np.allclose(pts[-1], cb)
    for s, t in zip(p.segments, p.segments[1:]):
        assert np.allclose(s[-1], t[0])
    for row in pts:
        f = a.with_b(tuple(row[:-1])).with_c(row[-1])
        assert barycentric_genus_test(f).verdict == GENUS1


def test_path_identity():
    p = path_connect(triangle(), triangle())
    assert p.sample_count() == 1


def test_path_around_deltoid():
    a, b = deltoid(-4), deltoid(4 * cmath.exp(1j * math.pi / 3))
    p = path_connect(a, b)
    assert p.stage_labels == ["gamma1", "gamma3", "gamma4", "gamma2"]
    assert all(len(s) >= 100 for s in p.segments)
    _check_path(p, a, b)


def test_path_triangle_to_rotated():
    a = triangle()
    b = circuit_polynomial([(0, 0), (2, 1), (1, 2)], (1, 1), (1, 2, 2j), 9)
    p = path_connect(a, b)
    assert p.sample_count() >= 400
    _check_path(p, a, b)
    assert all(v == GENUS1 for stage in p.verdicts for v in stage)
