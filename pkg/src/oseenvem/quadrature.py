"""Edge and polygon quadrature rules.

Edge rules live on the reference interval [-1, 1].  Polygon rules are built by
splitting the cell into triangles (a fan from the centroid, or ear clipping when
the fan is not valid) and mapping a collapsed Gauss rule onto every triangle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre
from scipy.special import roots_jacobi

from .errors import TriangulationFailure


@dataclass(frozen=True)
class QuadratureRule1D:
    points: np.ndarray
    weights: np.ndarray
    degree: int

    def mapped(self, a, b):
        """Map the rule onto the segment from ``a`` to ``b`` (2D points).

        Returns physical points and weights; the weights sum to the segment
        length.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        s = 0.5 * (1.0 + self.points)
        pts = a[None, :] * (1.0 - s)[:, None] + b[None, :] * s[:, None]
        length = float(np.hypot(*(b - a)))
        return pts, self.weights * (0.5 * length)


@dataclass(frozen=True)
class PolygonRule:
    points: np.ndarray
    weights: np.ndarray
    degree: int


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int) -> QuadratureRule1D:
    """n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1."""
    if n < 1:
        raise ValueError("gauss_legendre needs n >= 1")
    x, w = _gauss_legendre(n)
    return QuadratureRule1D(x, w, 2 * n - 1)


@lru_cache(maxsize=None)
def _gauss_lobatto(n: int):
    if n == 2:
        x = np.array([-1.0, 1.0])
    else:
        # interior nodes are the roots of P'_{n-1}
        c = np.zeros(n)
        c[-1] = 1.0
        interior = legendre.legroots(legendre.legder(c))
        # polish with Newton on P'_{n-1}
        d1 = legendre.legder(c)
        d2 = legendre.legder(c, 2)
        for _ in range(3):
            interior = interior - legendre.legval(interior, d1) / legendre.legval(interior, d2)
        x = np.concatenate(([-1.0], np.sort(interior), [1.0]))
        # enforce exact symmetry
        x = 0.5 * (x - x[::-1])
    c = np.zeros(n)
    c[-1] = 1.0
    pn = legendre.legval(x, c)
    w = 2.0 / (n * (n - 1) * pn**2)
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_lobatto(n: int) -> QuadratureRule1D:
    """n-point Gauss-Lobatto rule (endpoints included), exact to degree 2n-3."""
    if n < 2:
        raise ValueError("gauss_lobatto needs n >= 2")
    x, w = _gauss_lobatto(n)
    return QuadratureRule1D(x, w, 2 * n - 3)


@lru_cache(maxsize=None)
def reference_triangle_rule(degree: int):
    """Collapsed (Duffy) Gauss rule on the triangle (0,0), (1,0), (0,1).

    Gauss-Legendre along the collapsed direction and Gauss-Jacobi(1, 0) across
    it; exact for total degree ``degree``, all weights positive, all points
    strictly interior.  Weights sum to 1/2.
    """
    n = max(1, (degree + 2) // 2)
    gu, wu = _gauss_legendre(n)
    gv, wv = roots_jacobi(n, 1.0, 0.0)
    u = 0.5 * (1.0 + gu)
    v = 0.5 * (1.0 + gv)
    U, V = np.meshgrid(u, v, indexing="ij")
    WU, WV = np.meshgrid(wu, wv, indexing="ij")
    x = (U * (1.0 - V)).ravel()
    y = V.ravel()
    # du = dt/2, (1-v) dv = (1-t)/4 dt
    w = (WU * WV).ravel() * 0.125
    pts = np.column_stack([x, y])
    pts.setflags(write=False)
    w.setflags(write=False)
    return pts, w


def signed_area(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True

    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])) and (min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    if d1 == 0 and on_seg(q1, q2, p1):
        return True
    if d2 == 0 and on_seg(q1, q2, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, q1):
        return True
    if d4 == 0 and on_seg(p1, p2, q2):
        return True
    return False


def is_simple(verts: np.ndarray) -> bool:
    """True if the closed polygon has no self-intersections or repeated vertices."""
    n = len(verts)
    if n < 3:
        return False
    if len(np.unique(np.round(verts, 15), axis=0)) < n:
        return False
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            # skip adjacent edges
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_cross(a, b, verts[j], verts[(j + 1) % n]):
                return False
    return True


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _point_in_triangle(p, a, b, c) -> bool:
    return _cross(a, b, p) >= 0 and _cross(b, c, p) >= 0 and _cross(c, a, p) >= 0


def ear_clip(verts: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate a simple CCW polygon by ear clipping."""
    idx = list(range(len(verts)))
    tris = []
    guard = 0
    while len(idx) > 3:
        m = len(idx)
        for t in range(m):
            i0, i1, i2 = idx[(t - 1) % m], idx[t], idx[(t + 1) % m]
            a, b, c = verts[i0], verts[i1], verts[i2]
            if _cross(a, b, c) <= 0:
                continue
            if any(_point_in_triangle(verts[j], a, b, c) for j in idx if j not in (i0, i1, i2)):
                continue
            tris.append((i0, i1, i2))
            del idx[t]
            break
        else:
            raise TriangulationFailure("no ear found; polygon is not simple or not CCW")
        guard += 1
        if guard > 10 * len(verts):
            raise TriangulationFailure("ear clipping did not terminate")
    tris.append(tuple(idx))
    return tris


def triangulate(verts: np.ndarray, centroid=None) -> np.ndarray:
    """Split a CCW polygon into triangles, returned as an (nt, 3, 2) array.

    The centroid fan is used when every fan triangle has positive area;
    otherwise the polygon is ear-clipped.
    """
    verts = np.asarray(verts, dtype=float)
    if centroid is None:
        centroid = polygon_centroid(verts)
    nxt = np.roll(verts, -1, axis=0)
    fan_area = 0.5 * ((verts[:, 0] - centroid[0]) * (nxt[:, 1] - centroid[1])
                      - (verts[:, 1] - centroid[1]) * (nxt[:, 0] - centroid[0]))
    scale = max(abs(signed_area(verts)), 1e-300)
    if np.all(fan_area > 1e-12 * scale):
        c = np.broadcast_to(centroid, verts.shape)
        return np.stack([c, verts, nxt], axis=1)
    if not is_simple(verts):
        raise TriangulationFailure("polygon is self-intersecting")
    if signed_area(verts) <= 0:
        raise TriangulationFailure("polygon is not counter-clockwise")
    tris = ear_clip(verts)
    return np.array([[verts[i], verts[j], verts[k]] for i, j, k in tris])


def polygon_centroid(verts: np.ndarray) -> np.ndarray:
    x, y = verts[:, 0], verts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = 0.5 * cr.sum()
    if a == 0.0:
        # degenerate (zero net area) input: fall back to the vertex mean
        return verts.mean(axis=0)
    cx =((x + xn) * cr).sum() / (6.0 * a)
    cy = ((y + yn) * cr).sum() / (6.0 * a)
    return np.array([cx, cy])


def triangles_rule(tris: np.ndarray, degree: int):
    ref_pts, ref_w = reference_triangle_rule(degree)
    a = tris[:, 0, :]
    e1 = tris[:, 1, :] - a
    e2 = tris[:, 2, :] - a
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    pts = (a[:, None, :] + ref_pts[None, :, 0:1] * e1[:, None, :]
           + ref_pts[None, :, 1:2] * e2[:, None, :])
    w = det[:, None] * ref_w[None, :]
    return pts.reshape(-1, 2), w.ravel()


def polygon_rule(geom, degree: int) -> PolygonRule:
    """Quadrature on a polygon exact for polynomials of total degree ``degree``.

    ``geom`` is anything exposing ``vertices`` and ``centroid`` (an
    :class:`~oseenvem.mesh.ElementGeometry`) or a raw (n, 2) vertex array.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if isinstance(geom, np.ndarray):
        verts, centroid = geom, polygon_centroid(geom)
    else:
        verts, centroid = geom.vertices, geom.centroid
    pts, w = triangles_rule(triangulate(verts, centroid), degree)
    return PolygonRule(pts, w, degree)


def integrate_monomials(geom, k: int) -> np.ndarray:
    """Integrals over the element of all scaled monomials of degree <= 2k."""
    from .polybasis import integrate_monomials as _impl

    return _impl(geom, k)
