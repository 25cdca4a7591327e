import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circuit_amoeba.errors import ExpansionBudgetExceeded, InvalidInput, PreconditionFailed
from circuit_amoeba.lopsided import (SparsePolynomial, as_sparse, lopsided_grid_mask,
                                     lopsided_outside_certificate, norm_sequence, norm_sequence_from_values,
                                     purbhoo_refine, refined_membership, torus_invariance_check)

from conftest import deltoid, triangle, random_coeffs, random_support


def expand_rotation_product(f, r):
    """Independent oracle: multiply the rotated copies as dense numpy arrays."""
    p = as_sparse(f)
    exps = np.array(p.exps)
    size = exps.max(axis=0) + 1
    acc = np.ones((1,) * p.n, dtype=complex)
    for k in np.ndindex(*(r,) * p.n):
        factor = np.zeros(size, dtype=complex)
        for e, c in zip(exps, p.coeffs):
            factor[tuple(e)] += c * cmath.exp(2j * math.pi * float(np.dot(k, e)) / r)
        out = np.zeros(tuple(np.add(acc.shape, size) - 1), dtype=complex)
        for idx in np.ndindex(*acc.shape):
            if acc[idx] != 0:
                sl = tuple(slice(i, i + s) for i, s in zip(idx, size))
                out[sl] += acc[idx] * factor
        acc = out
    return acc


def test_norm_sequence_examples():
    assert norm_sequence_from_values([5, 1, 1, 1]).dominant == 0
    assert norm_sequence_from_values([1, 1, 1]).dominant is None
    seq = norm_sequence(triangle(), (0, 0))
    assert np.allclose(seq.norms, [1, 1, 1, 4])
    assert seq.dominant == 3


def test_certificate_examples():
    assert lopsided_outside_certificate(triangle(), (0, 0)) == (1, 1)
    assert lopsided_outside_certificate(triangle(-3), (0, 0)) is None  # tie 3 = 1 + 1 + 1
    assert lopsided_outside_certificate(deltoid(0), (10, 0)) == (3, 0)


def test_no_overflow_far_out():
    assert lopsided_outside_certificate(triangle(), (800, 0)) == (2, 1)


def test_torus_invariance_examples():
    f = triangle()
    assert torus_invariance_check(f, (0, 0))
    assert torus_invariance_check(f, (0, 0), others=[f.with_b((1, 1, 1j))])
    with pytest.raises(InvalidInput):
        torus_invariance_check(f, (0, 0), others=[f.with_b((1, 1, 2))])
    with pytest.raises(PreconditionFailed):
        torus_invariance_check(triangle(-3), (0, 0))


def test_refine_r1_identity():
    p = as_sparse(triangle())
    assert purbhoo_refine(p, 1).terms() == p.terms()


def test_refine_one_plus_z():
    q = purbhoo_refine(SparsePolynomial.from_dict({(0,): 1, (1,): 1}), 2).terms()
    assert set(q) == {(0,), (2,)}
    assert q[(0,)] == pytest.approx(1) and q[(2,)] == pytest.approx(-1)


def test_refine_deltoid_r2_degree():
    q = purbhoo_refine(deltoid(-4), 2)
    exps = np.array(q.exps)
    assert np.all(exps % 2 == 0)
    assert exps.sum(axis=1).max() == 12


@pytest.mark.parametrize("r", [2, 3])
def test_refine_matches_dense_oracle(r):
    f = triangle(2 + 1j, b=(1, 0.5j, 1.5))
    dense = expand_rotation_product(f, r)
    q = purbhoo_refine(f, r).terms()
    scale = np.max(np.abs(dense))
    for idx in np.ndindex(*dense.shape):
        assert abs(q.get(idx, 0) - dense[idx]) < 1e-9 * scale


def test_refine_budget():
    with pytest.raises(ExpansionBudgetExceeded):
        purbhoo_refine(triangle(), 4)
    with pytest.raises(ExpansionBudgetExceeded):
        purbhoo_refine(triangle(), 2, max_terms=10)


def test_refined_membership_examples():
    f = deltoid(2.2)
    assert refined_membership(f, (0, 0), 1) is None
    cert = refined_membership(f, (0, 0), 2)
    assert cert is not None and cert.order == (1, 1)
    assert refined_membership(deltoid(2.2), (10, 0), 1).order == (3, 0)
    assert refined_membership(triangle(), (0.3, -0.2), 1).order == lopsided_outside_certificate(triangle(), (0.3, -0.2))


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6))
def test_refine_properties(seed):
    rng = np.random.default_rng(seed)
    alphas, y = random_support(rng, bound=4)
    from circuit_amoeba.core import circuit_polynomial
    b = [1.0] + list(rng.uniform(-2, 2, 2))
    real = circuit_polynomial(alphas, y, b, float(rng.uniform(-3, 3)))
    q = purbhoo_refine(real, 2)
    assert np.all(np.array(q.exps) % 2 == 0)
    mag = np.max(np.abs(q.coeffs))
    assert np.max(np.abs(q.coeffs.imag)) < 1e-12 * mag
    # choose c so that f vanishes at z0; the rotation product must vanish there too
    z0 = np.exp(rng.uniform(-0.3, 0.3, 2) + 1j * rng.uniform(0, 2 * math.pi, 2))
    outer = sum(bi * np.prod(z0 ** np.array(a)) for bi, a in zip(b, alphas))
    f = real.with_c(-outer / np.prod(z0 ** np.array(y)))
    assert abs(f(z0)) < 1e-12 * (1 + abs(outer))
    qf = purbhoo_refine(f, 2)
    term_sum = sum(abs(cf) * abs(np.prod(z0 ** np.array(e))) for e, cf in qf.terms().items())
    assert abs(qf(z0)) < 1e-9 * term_sum


def test_grid_mask_matches_pointwise():
    pts = np.random.default_rng(1).uniform(-3, 3, (200, 2))
    mask = lopsided_grid_mask(triangle(), pts, r=1)
    for p, m in zip(pts, mask):
        assert m == (lopsided_outside_certificate(triangle(), p) is not None)
