"""Self-check suites run by ``oseenvem verify``.

Each property is a function returning (ok, detail).  The quadrature oracle
here is independent of the triangulation used by the library: the polygon is
cut into vertical slabs at its vertex abscissae, y is integrated in closed
form and x with a Gauss rule, which is exact for polynomial integrands.
"""

from __future__ import annotations

import contextlib
import time
from dataclasses import dataclass

import numpy as np

from . import forms, lps, quadrature
from . import polybasis as pb
from .mesh import generate, element_geometry
from .problems import example1, example2, example3, example4, stokes_patch


def slab_integrate(verts: np.ndarray, a: int, b: int, center=(0.0, 0.0), scale: float = 1.0) -> float:
    """Exact integral of ((x-cx)/s)^a ((y-cy)/s)^b over a simple polygon."""
    V = (np.asarray(verts, dtype=float) - np.asarray(center)) / scale
    xs = np.unique(V[:, 0])
    nxt = np.roll(V, -1, axis=0)
    n_gauss = (a + b + 2) // 2 + 1
    t, w = np.polynomial.legendre.leggauss(n_gauss)
    total = 0.0
    for x0, x1 in zip(xs[:-1], xs[1:]):
        xm = 0.5 * (x0 + x1)
        crossing = []
        for p, q in zip(V, nxt):
            lo, hi = min(p[0], q[0]), max(p[0], q[0])
            if lo <= x0 and hi >= x1 and hi > lo:
                crossing.append((p, q))
        crossing.sort(key=lambda e: e[0][1] + (e[1][1] - e[0][1]) * (xm - e[0][0]) / (e[1][0] - e[0][0]))
        X = 0.5 * (x1 - x0) * t + xm
        W = 0.5 * (x1 - x0) * w
        acc = np.zeros_like(X)
        for (p0, q0), (p1, q1) in zip(crossing[0::2], crossing[1::2]):
            ylo = p0[1] + (q0[1] - p0[1]) * (X - p0[0]) / (q0[0] - p0[0])
            yhi = p1[1] + (q1[1] - p1[1]) * (X - p1[0]) / (q1[0] - p1[0])
            acc += (yhi ** (b + 1) - ylo ** (b + 1)) / (b + 1)
        total += W @ (X**a * acc)
    return float(total * scale**2)


def random_polygon(rng, n_vertices: int, concave: bool = False) -> np.ndarray:
    """Star-shaped random polygon around the origin, CCW; optionally with a reflex vertex."""
    while True:
        ang = np.sort(rng.uniform(0, 2 * np.pi, n_vertices))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
        if gaps.min() < 0.35 or gaps.max() > np.pi * 0.9:
            continue
        rad = rng.uniform(0.6, 1.0, n_vertices)
        if concave:
            rad[rng.integers(n_vertices)] = 0.3
        V = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        V = V * rng.uniform(0.05, 2.0) + rng.uniform(-3, 3, 2)
        if quadrature.is_simple(V):
            return V


def polygon_sample(rng, count: int) -> list:
    """Mix of quads, pentagons, hexagons and concave polygons."""
    out = []
    for i in range(count):
        kind = i % 4
        if kind == 3:
            out.append(random_polygon(rng, int(rng.integers(5, 8)), concave=True))
        else:
            out.append(random_polygon(rng, 4 + kind))
    return out


@contextlib.contextmanager
def corrupted_quadrature(factor: float = 1.001):
    """Scale all triangle-rule weights: a fault-injection hook for the suite itself."""
    original = quadrature.reference_triangle_rule

    def bad(degree):
        pts, w = original(degree)
        return pts, w * factor

    quadrature.reference_triangle_rule = bad
    try:
        yield
    finally:
        quadrature.reference_triangle_rule = original


# properties ----------------------------------------------------------------

def prop_quadrature_exactness(n_polygons: int = 50, seed: int = 1, max_degree: int = 8):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for V in polygon_sample(rng, n_polygons):
        geom = element_geometry(V)
        for deg in range(0, max_degree + 1, 2):
            rule = quadrature.polygon_rule(geom, deg)
            vals = pb.eval_scaled(rule.points, geom.centroid, geom.diameter, deg)
            got = rule.weights @ vals
            for j, (a, b) in enumerate(pb.exponents(deg)):
                ref = slab_integrate(V, int(a), int(b), geom.centroid, geom.diameter)
                worst = max(worst, abs(got[j] - ref) / max(abs(ref), geom.area))
    return worst <= 1e-12, f"worst relative error {worst:.2e}"


def prop_projector_reproduction(n_polygons: int = 100, seed: int = 2):
    from .vemspace import build_local_space

    rng = np.random.default_rng(seed)
    worst = 0.0
    for V in polygon_sample(rng, n_polygons):
        for k in (1, 2):
            sp = build_local_space(V, k)
            nk, nk1 = sp.nk, sp.nk1
            I = np.eye(nk)
            Dx, Dy = pb.derivative_maps(k)
            checks = [
                (sp.PiN @ sp.D, I),
                (sp.P0 @ sp.D, I),
                (sp.PiN1 @ sp.D[:, :nk1], np.eye(nk1)),
                (sp.PG[0] @ sp.D, Dx[:nk1] / sp.h),
                (sp.PG[1] @ sp.D, Dy[:nk1] / sp.h),
                (sp.PGk[0] @ sp.D, Dx / sp.h),
                (sp.PGk[1] @ sp.D, Dy / sp.h),
            ]
            for got, ref in checks:
                worst = max(worst, np.abs(got - ref).max() / max(1.0, np.abs(ref).max()))
    return worst <= 1e-9, f"worst relative error {worst:.2e}"


def prop_form_consistency(n_polygons: int = 30, seed: int = 3):
    """a_h(v, m) and d_h(v, m) are exact when one argument is a polynomial."""
    from .vemspace import build_local_space

    rng = np.random.default_rng(seed)
    worst = 0.0
    for V in polygon_sample(rng, n_polygons):
        for k in (1, 2):
            sp = build_local_space(V, k)
            ref = sp.B.T.copy()
            ref[:, 0] = 0.0
            got = forms.local_a(sp, 1.0) @ sp.D
            worst = max(worst, np.abs(got - ref).max() / np.abs(ref).max())
            ref = sp.P0.T @ sp.H
            got = forms.local_d(sp, 1.0) @ sp.D
            worst = max(worst, np.abs(got - ref).max() / np.abs(ref).max())
    return worst <= 1e-10, f"worst relative error {worst:.2e}"


def prop_skew_symmetry(seed: int = 4):
    from .system import assemble

    rng = np.random.default_rng(seed)
    worst = 0.0
    for fam in ("squares", "distorted", "nonconvex", "voronoi"):
        mesh = generate(fam, 4)
        for k in (1, 2):
            for variant in ("skew", "hat"):
                sys = assemble(mesh, k, example2(1.0), variant=variant, keep_parts=True)
                C = sys.parts["C"]
                norm = abs(C).sum(axis=1).max()
                for _ in range(20):
                    v = rng.standard_normal(C.shape[0])
                    worst = max(worst, abs(v @ (C @ v)) / (v @ v * norm))
    return worst <= 1e-12, f"worst |v'Cv|/(|v|^2 |C|) {worst:.2e}"


def prop_lps_vanishing(n_polygons: int = 40, seed: int = 5):
    from .vemspace import build_local_space

    rng = np.random.default_rng(seed)
    params = lps.StabilizationParams()
    worst = 0.0
    for V in polygon_sample(rng, n_polygons):
        for k in (1, 2):
            sp = build_local_space(V, k)
            B = rng.standard_normal(2)
            L1 = lps.local_L1(sp, B, params)
            L2 = lps.local_L2(sp, params)
            L3 = lps.local_L3(sp, params)
            scale = max(np.abs(L1).max(), np.abs(L2).max(), np.abs(L3).max(), 1.0)
            nk1 = sp.nk1
            for j in range(nk1):
                d = sp.D[:, j]
                worst = max(worst, np.abs(L1 @ d).max() / scale, np.abs(L3 @ d).max() / scale)
            for M in (L1, L2, L3):
                x = rng.standard_normal(M.shape[0])
                if x @ M @ x < -1e-12 * scale * (x @ x):
                    return False, "indefinite stabilization matrix"
    return worst <= 1e-10, f"worst residual on P_(k-1) {worst:.2e}"


def prop_patch_test():
    from .analysis import compute_errors
    from .system import solve_problem

    worst = 0.0
    for fam in ("squares", "distorted", "nonconvex", "voronoi"):
        mesh = generate(fam, 4)
        for k in (1, 2):
            prob = stokes_patch(k)
            sol, _, sys = solve_problem(mesh, k, prob)
            e = compute_errors(mesh, k, sol, prob, spaces=sys.spaces)
            worst = max(worst, e.EuH1, e.EuL2, e.EpL2)
    return worst <= 1e-8, f"worst patch error {worst:.2e}"


def prop_problem_residuals():
    worst = 0.0
    for prob in (example1(1.0, 1.0), example1(0.0, 0.0), example2(1.0), example3(1e-8, 0.1),
                 example3(0.0, 1.1), example4(1e-2), stokes_patch(1), stokes_patch(2)):
        worst = max(worst, prob.check())
    return worst <= 1e-8, f"worst relative momentum residual {worst:.2e}"


PROPERTIES = {
    "quadrature-exactness": prop_quadrature_exactness,
    "projector-reproduction": prop_projector_reproduction,
    "form-consistency": prop_form_consistency,
    "skew-symmetry": prop_skew_symmetry,
    "lps-vanishing": prop_lps_vanishing,
    "patch-test": prop_patch_test,
    "problem-residuals": prop_problem_residuals,
}


@dataclass
class PropertyResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def run_all(names=None, inject: str | None = None) -> list:
    names = list(names or PROPERTIES)
    ctx = corrupted_quadrature() if inject == "quadrature" else contextlib.nullcontext()
    if inject not in (None, "quadrature"):
        raise ValueError(f"unknown fault {inject!r}")
    results = []
    with ctx:
        for name in names:
            t0 = time.perf_counter()
            try:
                ok, detail = PROPERTIES[name]()
            except Exception as exc:  # a crash is a failed property, not a crashed suite
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            results.append(PropertyResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results
