import numpy as np
import pytest
from hypothesis import given, strategies as st

from oseenvem import polybasis as pb
from oseenvem.errors import SingularProjector
from oseenvem.mesh import generate, generate_structured_quads
from oseenvem.vemspace import (SpaceCache, build_dof_layout, build_local_space, dump_matrices,
                               interpolate, n_local_dofs)
from oseenvem.verify import random_polygon

from conftest import regular_polygon, unit_square


def test_layout_counts():
    assert build_dof_layout(generate_structured_quads(2), 1).n_dofs == 9
    assert build_dof_layout(generate_structured_quads(1), 2).n_dofs == 9
    assert n_local_dofs(6, 2) == 13
    assert build_local_space(regular_polygon(6), 2).ndof == 13


@pytest.mark.parametrize("family", ["squares", "distorted", "nonconvex", "voronoi"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_layout_shared_edge_nodes_coincide(family, k):
    mesh = generate(family, 3)
    lay = build_dof_layout(mesh, k)
    for c in range(mesh.n_cells):
        sp = build_local_space(mesh.cell_vertices(c), k)
        g = lay.cell_dofs[c]
        nodal = slice(0, sp.geom.n_vertices * k)
        # local nodal positions must match the global coordinates of the mapped DOFs
        Vx = sp.D[nodal]  # monomial values at the nodes identify the positions
        X = lay.coords[g[nodal]]
        assert np.all(np.isfinite(X))
        V = pb.eval_scaled(X, sp.centroid, sp.h, k)
        assert np.allclose(V, Vx, atol=1e-12)
    assert lay.boundary.sum() == mesh.boundary_vertex_flags.sum() + (k - 1) * mesh.boundary_edge_flags.sum()


def test_interpolate_monomials_give_D_columns(polygons):
    for V in polygons[:6]:
        for k in (1, 2, 3):
            sp = build_local_space(V, k)
            for j in range(sp.nk):
                f = lambda P, j=j: pb.eval_scaled(P, sp.centroid, sp.h, k)[:, j]  # noqa: E731
                assert np.allclose(interpolate(sp, f), sp.D[:, j], atol=1e-13)


def test_interpolate_constant():
    sp = build_local_space(regular_polygon(5), 3)
    d = interpolate(sp, lambda P: np.ones(len(P)))
    assert np.allclose(d[: 5 * 3], 1.0)
    assert d[sp.moment_slice][0] == pytest.approx(1.0, abs=1e-14)


def test_interpolate_moment_against_adaptive_oracle():
    from scipy.integrate import dblquad

    V = np.array([[0.1, 0.0], [1.0, 0.2], [0.8, 0.9], [0.0, 0.7]])
    sp = build_local_space(V, 2)
    f = lambda x, y: np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y)  # noqa: E731
    d = interpolate(sp, lambda P: f(P[:, 0], P[:, 1]))
    # quad split into three vertical slabs at the vertex abscissae
    xs = np.unique(V[:, 0])
    lines = lambda p, r: (lambda x: p[1] + (r[1] - p[1]) * (x - p[0]) / (r[0] - p[0]))  # noqa: E731
    nxt = np.roll(V, -1, axis=0)
    total = 0.0
    for x0, x1 in zip(xs[:-1], xs[1:]):
        es = [lines(p, r) for p, r in zip(V, nxt) if min(p[0], r[0]) <= x0 and max(p[0], r[0]) >= x1]
        lo, hi = sorted(es, key=lambda g: g(0.5 * (x0 + x1)))
        total += dblquad(lambda y, x: f(x, y), x0, x1, lo, hi, epsabs=1e-13, epsrel=1e-12)[0]
    assert d[sp.moment_slice][0] == pytest.approx(total / sp.area, rel=1e-8, abs=1e-10)


def test_unit_square_k1_reproduction():
    sp = build_local_space(unit_square(), 1)
    assert np.allclose(sp.PiN @ sp.D, np.eye(3), atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_reproduction_and_idempotence(polygons, k):
    for V in polygons:
        sp = build_local_space(V, k)
        I = np.eye(sp.nk)
        assert np.allclose(sp.PiN @ sp.D, I, atol=1e-10)
        assert np.allclose(sp.P0 @ sp.D, I, atol=1e-10)
        P = sp.PiN_hat
        assert np.abs(P @ P - P).max() <= 1e-10 * max(1.0, np.abs(P).max())
        P0 = sp.P0_hat
        assert np.abs(P0 @ P0 - P0).max() <= 1e-10 * max(1.0, np.abs(P0).max())


def test_G_equals_BD(polygons):
    for V in polygons:
        for k in (1, 2):
            sp = build_local_space(V, k)
            Gc = sp.Gtilde.copy()
            Gc[0] = sp.G[0]
            assert np.abs(sp.G - sp.B @ sp.D).max() <= 1e-10 * np.abs(sp.G).max()
            assert np.allclose(sp.G[1:], sp.Gtilde[1:], atol=1e-10 * np.abs(sp.G).max())


@given(st.integers(0, 5000), st.integers(4, 7), st.sampled_from([1, 2]))
def test_orthogonality_residuals(seed, nv, k):
    rng = np.random.default_rng(seed)
    sp = build_local_space(random_polygon(rng, nv, concave=nv > 5), k)
    v = rng.standard_normal(sp.ndof)
    # (grad (v - PiN v), grad m) = 0: B v is the exact gradient functional for rows >= 1
    r = sp.B[1:] @ v - sp.Gtilde[1:] @ (sp.PiN @ v)
    assert np.abs(r).max() <= 1e-10 * max(1.0, np.abs(sp.B).max() * np.abs(v).max())
    # (v - Pi0 v, m) = 0 with the moments C v from DOFs and enhancement
    r0 = sp.C @ v - sp.H @ (sp.P0 @ v)
    assert np.abs(r0).max() <= 1e-12 * max(1.0, np.abs(sp.C).max() * np.abs(v).max())


def test_enhancement_identity():
    sp = build_local_space(regular_polygon(7, 0.3), 2)
    v = np.random.default_rng(0).standard_normal(sp.ndof)
    # moments of order k-1 and k equal those of PiN v
    hi = slice(pb.dim(0), sp.nk)
    assert np.allclose((sp.C @ v)[hi], (sp.H @ sp.PiN @ v)[hi], atol=1e-13)


def test_gradient_projection_of_quadratic_on_pentagon():
    rng = np.random.default_rng(5)
    V = random_polygon(rng, 5)
    sp = build_local_space(V, 2)
    # q(x, y) = 3 + x - 2 y + x^2 - x y + 4 y^2
    qf = lambda P: 3 + P[:, 0] - 2 * P[:, 1] + P[:, 0] ** 2 - P[:, 0] * P[:, 1] + 4 * P[:, 1] ** 2  # noqa: E731
    gx = lambda P: 1 + 2 * P[:, 0] - P[:, 1]  # noqa: E731
    gy = lambda P: -2 - P[:, 0] + 8 * P[:, 1]  # noqa: E731
    d = interpolate(sp, qf)
    pts = sp.xq
    for comp, g in zip(sp.PGk, (gx, gy)):
        vals = pb.eval_scaled(pts, sp.centroid, sp.h, 2) @ (comp @ d)
        assert np.allclose(vals, g(pts), atol=1e-9 * np.abs(g(pts)).max())
    for comp, g in zip(sp.PG, (gx, gy)):
        vals = pb.eval_scaled(pts, sp.centroid, sp.h, 1) @ (comp @ d)
        assert np.allclose(vals, g(pts), atol=1e-9 * np.abs(g(pts)).max())


def test_pi0_trace_stability_under_refinement():
    # Pi0 of DOF vectors bounded by the DOF sup norm, uniformly in h
    rng = np.random.default_rng(1)
    bounds = []
    for n in (2, 4, 8, 16):
        sp = build_local_space(unit_square() / n, 2)
        worst = 0.0
        for _ in range(50):
            v = rng.uniform(-1, 1, sp.ndof)
            vals = sp.Vq @ (sp.P0 @ v)
            worst = max(worst, np.abs(vals).max() / np.abs(v).max())
        bounds.append(worst)
    assert max(bounds) / min(bounds) < 1.5


def test_degenerate_cell_raises():
    flat = np.array([[0, 0], [1, 0], [2, 1e-14], [1, 1e-13]], float)
    with pytest.raises(SingularProjector):
        build_local_space(flat, 2)


def test_space_cache_matches_direct_build():
    mesh = generate("squares", 4)
    cache = SpaceCache(mesh, 2)
    for c in range(mesh.n_cells):
        a, b = cache[c], build_local_space(mesh.cell_vertices(c), 2)
        for name in ("PiN", "P0", "PG", "PGk", "Tb"):
            assert np.allclose(getattr(a, name), getattr(b, name), atol=1e-12)
        assert np.allclose(a.xq, b.xq, atol=1e-14)
    assert cache.hits > 0


def test_dump_matrices_shape_lines():
    sp = build_local_space(unit_square(), 1)
    text = dump_matrices(sp)
    assert text.splitlines()[0] == "D 4 3"
    assert "H 3 3" in text
