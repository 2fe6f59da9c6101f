import numpy as np
import pytest
from hypothesis import given, strategies as st

from oseenvem import polybasis as pb
from oseenvem import quadrature as q
from oseenvem.mesh import element_geometry

from conftest import unit_square


def test_dims_and_order():
    assert [pb.dim(k) for k in (-1, 0, 1, 2, 3)] == [0, 1, 3, 6, 10]
    assert pb.exponents(2).tolist() == [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]


def test_eval_at_centroid_and_offset():
    c, h = np.array([0.3, -0.2]), 0.7
    assert np.allclose(pb.eval_scaled(c[None], c, h, 2), [[1, 0, 0, 0, 0, 0]])
    assert np.allclose(pb.eval_scaled((c + [h, 0])[None], c, h, 1), [[1, 1, 0]])


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(1, 4))
def test_eval_matches_naive_powers(x, y, k):
    c, h = np.array([0.1, 0.2]), 0.9
    row = pb.eval_scaled(np.array([[x, y]]), c, h, k)[0]
    naive = [((x - c[0]) / h) ** a * ((y - c[1]) / h) ** b for a, b in pb.exponents(k)]
    assert np.allclose(row, naive, rtol=1e-15, atol=1e-15)


def test_gradient_of_m11():
    basis = pb.MonomialBasis(2, np.zeros(2), 0.5)
    gx, gy = basis.gradient_map()
    j = pb.index_of(2)[(1, 1)]
    expect = np.zeros(3)
    expect[pb.index_of(1)[(0, 1)]] = 1 / 0.5
    assert np.allclose(gx[:, j], expect)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    c, h, k = np.array([0.4, 0.6]), 0.3, 3
    pts = c + h * rng.uniform(-1, 1, (20, 2))
    gx, gy = pb.grad_scaled(pts, c, h, k)
    step = 1e-6 * h
    for d, g in enumerate((gx, gy)):
        e = np.zeros(2)
        e[d] = step
        fd = (pb.eval_scaled(pts + e, c, h, k) - pb.eval_scaled(pts - e, c, h, k)) / (2 * step)
        assert np.allclose(g, fd, atol=1e-6)


def test_tables_on_unit_square():
    geom = element_geometry(unit_square())
    t = pb.build_tables(pb.MonomialBasis(2, geom.centroid, geom.diameter), geom)
    assert t.H[0, 0] == pytest.approx(1.0, abs=1e-15)
    assert np.all(t.Gtilde[0] == 0) and np.all(t.Gtilde[:, 0] == 0)


def test_mass_matrix_matches_monomial_integrals(polygons):
    for V in polygons:
        geom = element_geometry(V)
        k = 2
        t = pb.build_tables(pb.MonomialBasis(k, geom.centroid, geom.diameter), geom)
        ints = q.integrate_monomials(geom, k)
        idx = pb.index_of(2 * k)
        ex = pb.exponents(k)
        H = np.array([[ints[idx[tuple(a + b)]] for b in ex] for a in ex])
        assert np.allclose(t.H, H, rtol=1e-13, atol=1e-13 * geom.area)


def test_laplacian_map():
    basis = pb.MonomialBasis(3, np.zeros(2), 2.0)
    L = basis.laplacian_map()
    j = pb.index_of(3)[(2, 1)]
    # laplacian of xi^2 eta is 2 eta, scaled by 1/h^2
    assert L[pb.index_of(1)[(0, 1)], j] == pytest.approx(2 / 4)
