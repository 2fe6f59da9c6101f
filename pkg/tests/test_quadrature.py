import numpy as np
import pytest
from hypothesis import given, strategies as st

from oseenvem import polybasis as pb
from oseenvem import quadrature as q
from oseenvem.errors import TriangulationFailure
from oseenvem.mesh import element_geometry, generate_nonconvex
from oseenvem.verify import random_polygon, slab_integrate

from conftest import L_CELL, regular_polygon, unit_square


def test_gauss_lobatto_two_points():
    r = q.gauss_lobatto(2)
    assert np.allclose(r.points, [-1, 1]) and np.allclose(r.weights, [1, 1])


def test_gauss_lobatto_three_points_closed_form():
    r = q.gauss_lobatto(3)
    assert np.allclose(r.points, [-1, 0, 1], atol=1e-15)
    assert np.allclose(r.weights, [1 / 3, 4 / 3, 1 / 3], atol=1e-15)
    for p in range(4):
        exact = 0.0 if p % 2 else 2.0 / (p + 1)
        assert r.weights @ r.points**p == pytest.approx(exact, abs=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_gauss_lobatto_exactness(n):
    r = q.gauss_lobatto(n)
    for p in range(2 * n - 2):
        exact = 0.0 if p % 2 else 2.0 / (p + 1)
        assert r.weights @ r.points**p == pytest.approx(exact, abs=1e-14)


def test_gauss_legendre_quadratic():
    r = q.gauss_legendre(2)
    assert r.weights @ r.points**2 == pytest.approx(2 / 3, abs=1e-15)
    assert r.degree == 3


def test_rules_reject_bad_sizes():
    with pytest.raises(ValueError):
        q.gauss_legendre(0)
    with pytest.raises(ValueError):
        q.gauss_lobatto(1)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_mapped_edge_weights_sum_to_length(ax, ay, bx, by):
    pts, w = q.gauss_legendre(5).mapped((ax, ay), (bx, by))
    assert w.sum() == pytest.approx(np.hypot(bx - ax, by - ay), rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("degree", range(0, 13))
def test_reference_triangle_rule(degree):
    pts, w = q.reference_triangle_rule(degree)
    assert np.all(w > 0) and w.sum() == pytest.approx(0.5, abs=1e-15)
    assert np.all(pts > 0) and np.all(pts.sum(1) < 1)
    from math import factorial
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            exact = factorial(a) * factorial(b) / factorial(a + b + 2)
            assert w @ (pts[:, 0] ** a * pts[:, 1] ** b) == pytest.approx(exact, rel=1e-13, abs=1e-16)


def test_unit_square_xy():
    rule = q.polygon_rule(element_geometry(unit_square()), 2)
    x, y = rule.points.T
    assert rule.weights @ (x * y) == pytest.approx(0.25, abs=1e-14)


def test_regular_hexagon_area():
    rule = q.polygon_rule(element_geometry(regular_polygon(6)), 0)
    assert rule.weights.sum() == pytest.approx(3 * np.sqrt(3) / 2, rel=1e-14)


def test_l_cell_ear_clipping_positive_weights():
    # both cells are concave; weights must stay positive whichever triangulation is used
    for verts in (L_CELL, generate_nonconvex(2).cell_vertices(0)):
        rule = q.polygon_rule(element_geometry(verts), 4)
        assert np.all(rule.weights > 0)
        assert rule.weights.sum() == pytest.approx(q.signed_area(verts), rel=1e-14)


def test_fan_fallback_used_for_invisible_centroid():
    # a thin C shape whose centroid lies outside the cell
    C = np.array([[0, 0], [3, 0], [3, 0.2], [0.2, 0.2], [0.2, 2.8], [3, 2.8], [3, 3], [0, 3]], float)
    rule = q.polygon_rule(element_geometry(C), 3)
    assert np.all(rule.weights > 0)
    for a, b in [(0, 0), (1, 0), (2, 1), (0, 3)]:
        got = rule.weights @ (rule.points[:, 0] ** a * rule.points[:, 1] ** b)
        assert got == pytest.approx(slab_integrate(C, a, b), rel=1e-12)


def test_self_intersecting_polygon_rejected():
    bow = np.array([[0, 0], [1, 1], [1, 0], [0, 1]], float)
    assert not q.is_simple(bow)
    with pytest.raises(TriangulationFailure):
        q.polygon_rule(bow, 2)


def test_integrate_monomials_constant_and_symmetry():
    geom = element_geometry(unit_square())
    m = q.integrate_monomials(geom, 2)
    assert m[0] == pytest.approx(1.0, abs=1e-15)
    assert m[1] == pytest.approx(0.0, abs=1e-15) and m[2] == pytest.approx(0.0, abs=1e-15)
    assert geom.diameter == pytest.approx(np.sqrt(2))


def test_slab_oracle_independent_values():
    # closed forms on the unit square and a right triangle
    sq = unit_square()
    assert slab_integrate(sq, 2, 3) == pytest.approx(1 / 12, rel=1e-15)
    tri = np.array([[0, 0], [1, 0], [0, 1]], float)
    assert slab_integrate(tri, 1, 1) == pytest.approx(1 / 24, rel=1e-15)


def test_random_quad_against_adaptive_oracle():
    from scipy.integrate import dblquad

    V = np.array([[0.1, 0.0], [1.0, 0.2], [0.8, 0.9], [0.0, 0.7]])
    geom = element_geometry(V)
    m = q.integrate_monomials(geom, 2)
    # adaptive dblquad over vertical slabs, no triangulation involved
    def over_polygon(fn):
        xs = np.unique(V[:, 0])
        total = 0.0
        nxt = np.roll(V, -1, axis=0)
        for x0, x1 in zip(xs[:-1], xs[1:]):
            xm = 0.5 * (x0 + x1)
            edges = [(p, r) for p, r in zip(V, nxt) if min(p[0], r[0]) <= x0 and max(p[0], r[0]) >= x1]
            line = lambda e: (lambda x: e[0][1] + (e[1][1] - e[0][1]) * (x - e[0][0]) / (e[1][0] - e[0][0]))
            lo, hi = sorted((line(e) for e in edges), key=lambda f: f(xm))
            total += dblquad(lambda y, x: fn(x, y), x0, x1, lo, hi, epsabs=1e-14, epsrel=1e-13)[0]
        return total
    for j, (a, b) in enumerate(pb.exponents(4)):
        ref = over_polygon(lambda x, y: ((x - geom.centroid[0]) / geom.diameter) ** a
                           * ((y - geom.centroid[1]) / geom.diameter) ** b)
        assert m[j] == pytest.approx(ref, rel=1e-8, abs=1e-12)


@given(st.integers(0, 10_000), st.integers(4, 7), st.booleans())
def test_polygon_rule_exact_against_slab_oracle(seed, nv, concave):
    V = random_polygon(np.random.default_rng(seed), nv, concave)
    geom = element_geometry(V)
    deg = 6
    rule = q.polygon_rule(geom, deg)
    vals = pb.eval_scaled(rule.points, geom.centroid, geom.diameter, deg)
    got = rule.weights @ vals
    for j, (a, b) in enumerate(pb.exponents(deg)):
        ref = slab_integrate(V, int(a), int(b), geom.centroid, geom.diameter)
        assert abs(got[j] - ref) <= 1e-12 * max(abs(ref), geom.area)
