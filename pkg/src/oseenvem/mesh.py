"""Polygonal meshes of the unit square: generators, regularity checks, file I/O.

Four generator families are provided:

* ``squares``   -- structured n x n quadrilaterals,
* ``distorted`` -- the same grid with randomly perturbed interior vertices,
* ``nonconvex`` -- every square split into two interlocking concave pentagons,
* ``voronoi``   -- clipped Voronoi tessellations smoothed by Lloyd iterations.

File format (UTF-8 text)::

    polymesh 1
    vertices <Nv>
    <x> <y>
    cells <Nc>
    <m> <i1> ... <im>

Edges and boundary flags are derived on load.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DegenerateCell, GenerationFailure, ParseError
from .quadrature import is_simple, polygon_centroid, signed_area

FAMILIES = ("squares", "distorted", "nonconvex", "voronoi")


@dataclass(frozen=True)
class ElementGeometry:
    vertices: np.ndarray
    area: float
    centroid: np.ndarray
    diameter: float
    edge_lengths: np.ndarray
    normals: np.ndarray  # unit outward, one per edge i: v_i -> v_{i+1}

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def edge_starts(self) -> np.ndarray:
        return self.vertices

    @property
    def edge_ends(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0)

    @property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())


def element_geometry(verts) -> ElementGeometry:
    verts = np.ascontiguousarray(verts, dtype=float)
    area = signed_area(verts)
    centroid = polygon_centroid(verts)
    d = verts[:, None, :] - verts[None, :, :]
    diameter = float(np.sqrt((d**2).sum(-1)).max())
    t = np.roll(verts, -1, axis=0) - verts
    lengths = np.hypot(t[:, 0], t[:, 1])
    normals = np.column_stack([t[:, 1], -t[:, 0]]) / lengths[:, None]
    return ElementGeometry(verts, area, centroid, diameter, lengths, normals)


@dataclass(frozen=True, eq=False)
class PolyMesh:
    """Vertices plus CCW vertex cycles; topology is derived lazily."""

    vertices: np.ndarray
    cells: tuple = field(default_factory=tuple)
    concave: bool = False

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        cells = tuple(np.asarray(c, dtype=np.int64) for c in self.cells)
        object.__setattr__(self, "cells", cells)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def cell_vertices(self, c: int) -> np.ndarray:
        return self.vertices[self.cells[c]]

    def geometry(self, c: int) -> ElementGeometry:
        return element_geometry(self.cell_vertices(c))

    @cached_property
    def _topology(self):
        lookup = {}
        edges = []
        edge_cells = []
        cell_edges = []
        for c, cyc in enumerate(self.cells):
            m = len(cyc)
            ids = np.empty(m, dtype=np.int64)
            for i in range(m):
                a, b = int(cyc[i]), int(cyc[(i + 1) % m])
                key = (a, b) if a < b else (b, a)
                e = lookup.get(key)
                if e is None:
                    e = len(edges)
                    lookup[key] = e
                    edges.append(key)
                    edge_cells.append([c])
                else:
                    edge_cells[e].append(c)
                ids[i] = e
            cell_edges.append(ids)
        return np.array(edges, dtype=np.int64).reshape(-1, 2), edge_cells, cell_edges

    @property
    def edges(self) -> np.ndarray:
        """(Ne, 2) vertex pairs, lower index first."""
        return self._topology[0]

    @property
    def edge_cells(self) -> list:
        return self._topology[1]

    @property
    def cell_edges(self) -> list:
        """Per cell, global edge id of local edge i (v_i -> v_{i+1})."""
        return self._topology[2]

    @cached_property
    def boundary_edge_flags(self) -> np.ndarray:
        return np.array([len(c) == 1 for c in self.edge_cells], dtype=bool)

    @cached_property
    def boundary_vertex_flags(self) -> np.ndarray:
        flags = np.zeros(self.n_vertices, dtype=bool)
        flags[self.edges[self.boundary_edge_flags].ravel()] = True
        return flags

    @cached_property
    def diameters(self) -> np.ndarray:
        return np.array([self.geometry(c).diameter for c in range(self.n_cells)])

    @property
    def h(self) -> float:
        return float(self.diameters.max())

    @cached_property
    def areas(self) -> np.ndarray:
        return np.array([signed_area(self.cell_vertices(c)) for c in range(self.n_cells)])

    def domain_area(self) -> float:
        """Area enclosed by the boundary edges (oriented as in their cell)."""
        total = 0.0
        for c, cyc in enumerate(self.cells):
            m = len(cyc)
            for i, e in enumerate(self.cell_edges[c]):
                if self.boundary_edge_flags[e]:
                    a = self.vertices[cyc[i]]
                    b = self.vertices[cyc[(i + 1) % m]]
                    total += 0.5 * (a[0] * b[1] - b[0] * a[1])
        return total

    def equals(self, other: "PolyMesh") -> bool:
        if self.n_cells != other.n_cells or self.vertices.shape != other.vertices.shape:
            return False
        if not np.array_equal(self.vertices, other.vertices):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.cells, other.cells))

    def to_text(self) -> str:
        lines = ["polymesh 1", f"vertices {self.n_vertices}"]
        lines += [f"{x!r} {y!r}" for x, y in self.vertices.tolist()]
        lines.append(f"cells {self.n_cells}")
        lines += [" ".join([str(len(c))] + [str(int(i)) for i in c]) for c in self.cells]
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# generators

def generate_structured_quads(n: int) -> PolyMesh:
    if n < 1:
        raise ValueError("n must be >= 1")
    t = np.arange(n + 1) / n
    X, Y = np.meshgrid(t, t, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])
    cells = []
    for j in range(n):
        for i in range(n):
            a = j * (n + 1) + i
            cells.append((a, a + 1, a + n + 2, a + n + 1))
    return PolyMesh(verts, tuple(cells))


def _cells_valid(verts, cells) -> bool:
    for c in cells:
        p = verts[list(c)]
        if signed_area(p) <= 0 or not is_simple(p):
            return False
    return True


def generate_distorted_quads(n: int, amplitude: float = 0.2, seed: int = 0) -> PolyMesh:
    """Structured grid with interior vertices moved by at most ``amplitude / n``."""
    if not 0 <= amplitude < 0.5:
        raise ValueError("amplitude must lie in [0, 0.5)")
    base = generate_structured_quads(n)
    if amplitude == 0:
        return base
    interior = ~base.boundary_vertex_flags
    rng = np.random.default_rng(seed)
    for _ in range(100):
        r = amplitude / n * rng.random(interior.sum())
        phi = 2.0 * np.pi * rng.random(interior.sum())
        verts = base.vertices.copy()
        verts[interior, 0] += r * np.cos(phi)
        verts[interior, 1] += r * np.sin(phi)
        if _cells_valid(verts, base.cells):
            return PolyMesh(verts, base.cells)
    raise DegenerateCell("perturbation kept producing invalid cells after 100 draws")


def generate_nonconvex(n: int) -> PolyMesh:
    """Each grid square split along a zigzag into two concave pentagons.

    The zigzag runs along the main diagonal on even squares and along the
    anti-diagonal on odd squares, giving a checkerboard of interlocking cells.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    base = generate_structured_quads(n)
    verts = [base.vertices]
    cells = []
    nv = base.n_vertices
    hs = 1.0 / n
    for j in range(n):
        for i in range(n):
            a = j * (n + 1) + i
            b, c, d = a + 1, a + n + 2, a + n + 1
            x0, y0 = i * hs, j * hs
            p, q = nv, nv + 1
            nv += 2
            if (i + j) % 2 == 0:
                verts.append(np.array([[x0 + 0.6 * hs, y0 + 0.3 * hs],
                                       [x0 + 0.4 * hs, y0 + 0.7 * hs]]))
                cells.append((a, b, c, q, p))
                cells.append((a, p, q, c, d))
            else:
                verts.append(np.array([[x0 + 0.4 * hs, y0 + 0.3 * hs],
                                       [x0 + 0.6 * hs, y0 + 0.7 * hs]]))
                cells.append((a, b, p, q, d))
                cells.append((b, c, d, q, p))
    return PolyMesh(np.vstack(verts), tuple(cells), concave=True)


def _clipped_voronoi(seeds: np.ndarray):
    from scipy.spatial import Voronoi

    mirrored = [seeds,
                np.column_stack([-seeds[:, 0], seeds[:, 1]]),
                np.column_stack([2.0 - seeds[:, 0], seeds[:, 1]]),
                np.column_stack([seeds[:, 0], -seeds[:, 1]]),
                np.column_stack([seeds[:, 0], 2.0 - seeds[:, 1]])]
    vor = Voronoi(np.vstack(mirrored))
    polys = []
    for i in range(len(seeds)):
        region = vor.regions[vor.point_region[i]]
        if -1 in region or len(region) < 3:
            raise GenerationFailure(f"unbounded Voronoi region for seed {i}")
        polys.append(np.asarray(region, dtype=np.int64))
    return vor.vertices, polys


def _merge_vertices(points: np.ndarray, polys, tol: float):
    from scipy.spatial import cKDTree

    pts = points.copy()
    pts[np.abs(pts) < tol] = 0.0
    pts[np.abs(pts - 1.0) < tol] = 1.0
    parent = np.arange(len(pts))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in sorted(cKDTree(pts).query_pairs(tol)):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    root = np.array([find(i) for i in range(len(pts))])
    used = sorted({int(root[v]) for poly in polys for v in poly})
    new_id = {old: new for new, old in enumerate(used)}
    cells = []
    for poly in polys:
        cyc = []
        for v in poly:
            r = new_id[int(root[v])]
            if not cyc or cyc[-1] != r:
                cyc.append(r)
        while len(cyc) > 1 and cyc[0] == cyc[-1]:
            cyc.pop()
        cells.append(cyc)
    return pts[used], cells


def _order_ccw(verts, cyc):
    p = verts[cyc]
    c = p.mean(axis=0)
    ang = np.arctan2(p[:, 1] - c[1], p[:, 0] - c[0])
    order = np.argsort(ang, kind="stable")
    out = [cyc[i] for i in order]
    # deterministic start: lowest vertex index
    s = out.index(min(out))
    return tuple(out[s:] + out[:s])


def _is_convex_ccw(p: np.ndarray) -> bool:
    prev = p - np.roll(p, 1, axis=0)
    nxt = np.roll(p, -1, axis=0) - p
    return bool(np.all(prev[:, 0] * nxt[:, 1] - prev[:, 1] * nxt[:, 0] > 0))


def _on_boundary(x, tol=1e-14):
    return (abs(x[0]) < tol or abs(x[0] - 1) < tol, abs(x[1]) < tol or abs(x[1] - 1) < tol)


def _collapse_short_edges(verts: np.ndarray, cells: list, min_length: float):
    """Merge endpoints of edges shorter than ``min_length`` while cells stay convex.

    Corner vertices never move and boundary vertices only slide along their side.
    """
    verts = verts.copy()
    cells = [list(c) for c in cells]
    alive = np.ones(len(verts), dtype=bool)
    touching = [set() for _ in range(len(verts))]
    cand = set()
    for ci, cyc in enumerate(cells):
        for i, v in enumerate(cyc):
            touching[v].add(ci)
            w = cyc[(i + 1) % len(cyc)]
            if np.hypot(*(verts[v] - verts[w])) < min_length:
                cand.add((min(v, w), max(v, w)))
    for a, b in sorted(cand, key=lambda e: float(np.hypot(*(verts[e[0]] - verts[e[1]])))):
        if not (alive[a] and alive[b]) or not (touching[a] & touching[b]):
            continue
        if np.hypot(*(verts[a] - verts[b])) >= min_length:
            continue
        ba, bb = _on_boundary(verts[a]), _on_boundary(verts[b])
        if all(ba) and all(bb):
            continue
        if all(ba):
            new = verts[a].copy()
        elif all(bb):
            new = verts[b].copy()
        else:
            new = 0.5 * (verts[a] + verts[b])
            clash = False
            for ax in (0, 1):
                if ba[ax] and bb[ax] and verts[a][ax] != verts[b][ax]:
                    clash = True
                elif ba[ax]:
                    new[ax] = verts[a][ax]
                elif bb[ax]:
                    new[ax] = verts[b][ax]
            if clash:
                continue
        # the midpoint first, then either endpoint if it keeps the boundary constraints
        need = tuple(x or y for x, y in zip(ba, bb))
        options = [new] + [p.copy() for p in (verts[a], verts[b])
                           if all(not f or g for f, g in zip(need, _on_boundary(p)))]
        saved = verts[a].copy()
        trial = None
        for pos in options:
            verts[a] = pos
            trial = {}
            for ci in touching[a] | touching[b]:
                c2 = [a if v == b else v for v in cells[ci]]
                c2 = [v for i, v in enumerate(c2) if v != c2[i - 1]]
                if len(c2) < 3 or not _is_convex_ccw(verts[c2]):
                    trial = None
                    break
                trial[ci] = c2
            if trial is not None:
                break
        if trial is None:
            verts[a] = saved
            continue
        for ci, c2 in trial.items():
            cells[ci] = c2
        touching[a] |= touching[b]
        touching[b] = set()
        alive[b] = False
    used = np.flatnonzero(alive)
    remap = -np.ones(len(verts), dtype=np.int64)
    remap[used] = np.arange(len(used))
    return verts[used], [[int(remap[v]) for v in c] for c in cells]


def generate_voronoi(n_seeds: int, lloyd_iterations: int = 0, seed: int = 0,
                     seeds: np.ndarray | None = None,
                     min_edge_fraction: float = 0.2) -> PolyMesh:
    """Voronoi tessellation of the unit square clipped by reflecting the seeds.

    ``seeds`` overrides the pseudo-random initial seeds drawn from ``seed``.
    Edges shorter than ``min_edge_fraction / sqrt(n_seeds)`` are collapsed
    when the neighbouring cells stay convex.
    """
    if seeds is None:
        if n_seeds < 4:
            raise ValueError("n_seeds must be >= 4")
        rng = np.random.default_rng(seed)
        seeds = rng.random((n_seeds, 2))
    else:
        seeds = np.asarray(seeds, dtype=float)
        if len(seeds) < 4:
            raise ValueError("need at least 4 seeds")
    tol = 1e-10
    for _ in range(lloyd_iterations):
        pts, polys = _clipped_voronoi(seeds)
        seeds = np.array([polygon_centroid(pts[p][np.argsort(np.arctan2(
            pts[p][:, 1] - s[1], pts[p][:, 0] - s[0]))]) for p, s in zip(polys, seeds)])
    pts, polys = _clipped_voronoi(seeds)
    verts, cycles = _merge_vertices(pts, polys, tol)
    cycles = [list(_order_ccw(verts, c)) for c in cycles]
    if min_edge_fraction > 0:
        # merges can shorten neighbouring edges, so repeat until nothing changes
        for _ in range(10):
            nv = len(verts)
            verts, cycles = _collapse_short_edges(verts, cycles,
                                                  min_edge_fraction / np.sqrt(len(seeds)))
            if len(verts) == nv:
                break
    cells = []
    for i, cyc in enumerate(cycles):
        if len(cyc) < 3:
            raise GenerationFailure(f"Voronoi cell {i} collapsed to {len(cyc)} vertices")
        cyc = _order_ccw(verts, cyc)
        p = verts[list(cyc)]
        if signed_area(p) <= 0:
            raise GenerationFailure(f"Voronoi cell {i} has non-positive area")
        cells.append(cyc)
    return PolyMesh(verts, tuple(cells))


def generate(family: str, n: int, seed: int = 0, amplitude: float = 0.2,
             lloyd: int = 10) -> PolyMesh:
    """Build a mesh of the given family at refinement level ``n``.

    For ``voronoi`` the number of seeds is ``n * n`` so that h scales like 1/n.
    """
    if family == "squares":
        return generate_structured_quads(n)
    if family == "distorted":
        return generate_distorted_quads(n, amplitude, seed)
    if family == "nonconvex":
        return generate_nonconvex(n)
    if family == "voronoi":
        return generate_voronoi(n * n, lloyd, seed)
    raise ValueError(f"unknown mesh family {family!r}; expected one of {FAMILIES}")


# --------------------------------------------------------------------------
# regularity

@dataclass
class RegularityReport:
    theta: float
    h: float
    min_edge_ratio: np.ndarray
    inradius_ratio: np.ndarray
    star_shaped: np.ndarray
    convex: np.ndarray
    reflex_count: np.ndarray
    area_sum: float
    domain_area: float
    issues: list

    @property
    def worst_edge_ratio(self) -> float:
        return float(self.min_edge_ratio.min())

    @property
    def worst_inradius_ratio(self) -> float:
        return float(self.inradius_ratio.min())

    @property
    def concave(self) -> bool:
        return bool((~self.convex).any())

    @property
    def structural_ok(self) -> bool:
        return not self.issues

    @property
    def passed(self) -> bool:
        return (self.structural_ok
                and self.worst_edge_ratio >= self.theta
                and self.worst_inradius_ratio >= self.theta
                and bool(self.star_shaped.all()))

    def summary(self) -> str:
        return (f"h={self.h:.4g} worst edge/h_E={self.worst_edge_ratio:.4g} "
                f"worst inradius/h_E={self.worst_inradius_ratio:.4g} "
                f"concave={self.concave} theta={self.theta} "
                f"{'PASS' if self.passed else 'FAIL'}")


def kernel_radius(verts: np.ndarray, n_grid: int = 5) -> float:
    """Largest r such that some sampled point sees a ball of radius r in the kernel.

    Candidates: the centroid plus an n_grid x n_grid grid inside the bounding box.
    The kernel of a CCW polygon is the intersection of the inner half-planes of
    its edges, so the admissible radius at p is the smallest signed distance
    from p to an edge line.
    """
    c = polygon_centroid(verts)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    f = (np.arange(n_grid) + 1.0) / (n_grid + 1.0)
    gx, gy = np.meshgrid(lo[0] + f * (hi[0] - lo[0]), lo[1] + f * (hi[1] - lo[1]))
    cand = np.vstack([c[None, :], np.column_stack([gx.ravel(), gy.ravel()])])
    a = verts
    t = np.roll(verts, -1, axis=0) - a
    length = np.hypot(t[:, 0], t[:, 1])
    # signed distance, positive to the left of each edge
    d = ((t[None, :, 0] * (cand[:, None, 1] - a[None, :, 1])
          - t[None, :, 1] * (cand[:, None, 0] - a[None, :, 0])) / length[None, :])
    return float(d.min(axis=1).max())


def validate(mesh: PolyMesh, theta: float = 0.1) -> RegularityReport:
    """Check the mesh against the regularity constant ``theta``; never raises."""
    nc = mesh.n_cells
    issues = []
    edge_ratio = np.zeros(nc)
    in_ratio = np.zeros(nc)
    convex = np.zeros(nc, dtype=bool)
    reflex = np.zeros(nc, dtype=np.int64)
    for c in range(nc):
        cyc = mesh.cells[c]
        if len(cyc) < 3:
            issues.append(f"cell {c}: fewer than 3 vertices")
            continue
        if np.any(cyc < 0) or np.any(cyc >= mesh.n_vertices):
            issues.append(f"cell {c}: vertex index out of range")
            continue
        p = mesh.cell_vertices(c)
        g = element_geometry(p)
        if g.area <= 0:
            issues.append(f"cell {c}: not counter-clockwise (signed area {g.area:.3g})")
        if not is_simple(p):
            issues.append(f"cell {c}: not a simple polygon")
        edge_ratio[c] = g.edge_lengths.min() / g.diameter
        in_ratio[c] = max(kernel_radius(p), 0.0) / g.diameter
        prev = p - np.roll(p, 1, axis=0)
        nxt = np.roll(p, -1, axis=0) - p
        turn = prev[:, 0] * nxt[:, 1] - prev[:, 1] * nxt[:, 0]
        reflex[c] = int((turn < -1e-14 * g.diameter**2).sum())
        convex[c] = reflex[c] == 0
    counts = np.array([len(c) for c in mesh.edge_cells]) if nc else np.zeros(0)
    if np.any(counts > 2):
        issues.append("edge shared by more than two cells")
    area_sum = float(mesh.areas.sum()) if nc else 0.0
    dom = mesh.domain_area() if nc else 0.0
    if nc and abs(area_sum - dom) > 1e-12 * max(abs(dom), 1.0):
        issues.append(f"cells do not tile the domain: {area_sum!r} vs {dom!r}")
    if nc and mesh.n_vertices - mesh.n_edges + nc != 1:
        issues.append("Euler relation V - E + F = 1 violated")
    return RegularityReport(theta, float(mesh.h) if nc else 0.0, edge_ratio, in_ratio,
                            in_ratio > 0, convex, reflex, area_sum, dom, issues)


# --------------------------------------------------------------------------
# I/O

def write_mesh(mesh: PolyMesh, path) -> None:
    Path(path).write_text(mesh.to_text(), encoding="utf-8")


def parse_mesh(text: str) -> PolyMesh:
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    it = iter(lines)

    def take(what):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(f"unexpected end of file while reading {what}") from None

    ln, s = take("header")
    if s.split() != ["polymesh", "1"]:
        raise ParseError("expected header 'polymesh 1'", ln, "header")
    ln, s = take("vertex count")
    parts = s.split()
    if len(parts) != 2 or parts[0] != "vertices":
        raise ParseError("expected 'vertices <N>'", ln, "vertices")
    try:
        nv = int(parts[1])
    except ValueError:
        raise ParseError("vertex count is not an integer", ln, "vertices") from None
    verts = np.empty((nv, 2))
    for i in range(nv):
        ln, s = take(f"vertex {i}")
        parts = s.split()
        if len(parts) != 2:
            raise ParseError(f"vertex {i} needs 2 coordinates", ln, "x y")
        try:
            verts[i] = [float(parts[0]), float(parts[1])]
        except ValueError:
            raise ParseError(f"vertex {i} has a non-numeric coordinate", ln, "x y") from None
        if not np.all(np.isfinite(verts[i])):
            raise ParseError(f"vertex {i} is not finite", ln, "x y")
    ln, s = take("cell count")
    parts = s.split()
    if len(parts) != 2 or parts[0] != "cells":
        raise ParseError("expected 'cells <N>'", ln, "cells")
    try:
        nc = int(parts[1])
    except ValueError:
        raise ParseError("cell count is not an integer", ln, "cells") from None
    cells = []
    for c in range(nc):
        ln, s = take(f"cell {c}")
        try:
            vals = [int(t) for t in s.split()]
        except ValueError:
            raise ParseError(f"cell {c} has a non-integer entry", ln, "indices") from None
        if not vals or vals[0] != len(vals) - 1:
            raise ParseError(f"cell {c}: vertex count does not match entries", ln, "m")
        if vals[0] < 3:
            raise ParseError(f"cell {c} has fewer than 3 vertices", ln, "m")
        idx = vals[1:]
        bad = [v for v in idx if v < 0 or v >= nv]
        if bad:
            raise ParseError(f"cell {c} references vertex {bad[0]} out of range [0, {nv})",
                             ln, "indices")
        cells.append(tuple(idx))
    extra = next(it, None)
    if extra is not None:
        raise ParseError("trailing content after cells", extra[0])
    return PolyMesh(verts, tuple(cells))


def read_mesh(path) -> PolyMesh:
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"file is not UTF-8: {exc}") from None
    return parse_mesh(text)


__all__ = [
    "ElementGeometry", "PolyMesh", "RegularityReport", "element_geometry",
    "generate", "generate_structured_quads", "generate_distorted_quads",
    "generate_nonconvex", "generate_voronoi", "validate", "read_mesh",
    "write_mesh", "parse_mesh", "kernel_radius", "FAMILIES",
]

