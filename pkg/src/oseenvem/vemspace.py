"""Enhanced H^1-conforming virtual element space of degree k on a polygon.

Local DOF ordering on an element with n_v vertices:

    [vertex values (n_v) | internal Gauss-Lobatto values, edge by edge (n_v (k-1))
     | scaled moments (1/|E|) int v m_a, |a| <= k-2]

All projector matrices map a local DOF vector to coefficients in the scaled
monomial basis of :mod:`oseenvem.polybasis`.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import polybasis as pb
from .errors import SingularProjector
from .mesh import ElementGeometry, PolyMesh, element_geometry
from .quadrature import gauss_legendre, gauss_lobatto, polygon_rule

log = logging.getLogger(__name__)

COND_LIMIT = 1e12


def n_local_dofs(n_vertices: int, k: int) -> int:
    return n_vertices * k + pb.dim(k - 2)


@lru_cache(maxsize=None)
def _edge_trace_matrix(k: int, n_quad: int):
    """Lagrange basis on the k+1 Gauss-Lobatto nodes evaluated at Gauss-Legendre points."""
    nodes = gauss_lobatto(k + 1).points
    t = gauss_legendre(n_quad).points
    L = np.ones((len(t), k + 1))
    for i in range(k + 1):
        for j in range(k + 1):
            if j != i:
                L[:, i] *= (t - nodes[j]) / (nodes[i] - nodes[j])
    L.setflags(write=False)
    return L


@dataclass(frozen=True)
class DofLayout:
    """Global scalar DOF numbering: vertices, then edge nodes, then cell moments."""

    mesh: PolyMesh
    k: int
    n_dofs: int
    cell_dofs: list
    boundary: np.ndarray       # bool mask over global scalar DOFs
    coords: np.ndarray         # nodal position, NaN for moment DOFs

    @property
    def n_moment(self) -> int:
        return pb.dim(self.k - 2)


def build_dof_layout(mesh: PolyMesh, k: int) -> DofLayout:
    if k < 1:
        raise ValueError("k must be >= 1")
    nv, ne, nc = mesh.n_vertices, mesh.n_edges, mesh.n_cells
    ke = k - 1
    nm = pb.dim(k - 2)
    n = nv + ne * ke + nc * nm
    edges = mesh.edges
    cell_dofs = []
    for c, cyc in enumerate(mesh.cells):
        m = len(cyc)
        loc = np.empty(m * k + nm, dtype=np.int64)
        loc[:m] = cyc
        for i, e in enumerate(mesh.cell_edges[c]):
            base = nv + e * ke
            g = base + np.arange(ke)
            if cyc[i] != edges[e, 0]:
                g = g[::-1]
            loc[m + i * ke: m + (i + 1) * ke] = g
        loc[m * k:] = nv + ne * ke + c * nm + np.arange(nm)
        cell_dofs.append(loc)
    boundary = np.zeros(n, dtype=bool)
    boundary[:nv] = mesh.boundary_vertex_flags
    coords = np.full((n, 2), np.nan)
    coords[:nv] = mesh.vertices
    if ke:
        t = gauss_lobatto(k + 1).points[1:-1]
        s = 0.5 * (1.0 + t)
        a = mesh.vertices[edges[:, 0]]
        b = mesh.vertices[edges[:, 1]]
        pts = a[:, None, :] * (1 - s)[None, :, None] + b[:, None, :] * s[None, :, None]
        coords[nv:nv + ne * ke] = pts.reshape(-1, 2)
        bnd_edges = np.flatnonzero(mesh.boundary_edge_flags)
        for e in bnd_edges:
            boundary[nv + e * ke: nv + (e + 1) * ke] = True
    return DofLayout(mesh, k, n, cell_dofs, boundary, coords)


@dataclass(frozen=True)
class LocalSpace:
    """Everything computable from the DOFs of one element.

    Quadrature points are stored relative to the centroid (``*_rel``) so one
    instance can be reused for translated copies of the same cell shape.
    """

    k: int
    geom: ElementGeometry
    ndof: int
    D: np.ndarray          # ndof x n_k, DOFs of the monomials
    B: np.ndarray          # n_k x ndof, right-hand side of the Pi-nabla system
    G: np.ndarray          # n_k x n_k
    H: np.ndarray          # n_k x n_k mass matrix
    Gtilde: np.ndarray     # n_k x n_k gradient Gram matrix
    C: np.ndarray          # n_k x ndof, int_E phi_j m_a
    PiN: np.ndarray        # Pi-nabla_k
    PiN1: np.ndarray       # Pi-nabla_{k-1}
    P0: np.ndarray         # Pi0_k
    PG: np.ndarray         # (2, n_{k-1}, ndof) Pi0_{k-1} grad
    PGk: np.ndarray        # (2, n_k, ndof) Pi0_k grad
    # interior rule of degree 2k+4
    xq_rel: np.ndarray
    wq: np.ndarray
    Vq: np.ndarray         # n_q x n_k
    Gxq: np.ndarray
    Gyq: np.ndarray
    # boundary rule, k+4 Gauss-Legendre points per edge
    xb_rel: np.ndarray
    wb: np.ndarray
    nb: np.ndarray         # outward normal at each boundary point
    Tb: np.ndarray         # n_b x ndof, exact edge trace of each basis function
    Vb: np.ndarray         # n_b x n_k
    edge_dofs: np.ndarray  # n_v x (k+1), local DOFs along each edge in GL order

    @property
    def nk(self) -> int:
        return pb.dim(self.k)

    @property
    def nk1(self) -> int:
        return pb.dim(self.k - 1)

    @property
    def centroid(self) -> np.ndarray:
        return self.geom.centroid

    @property
    def h(self) -> float:
        return self.geom.diameter

    @property
    def area(self) -> float:
        return self.geom.area

    @property
    def xq(self) -> np.ndarray:
        return self.xq_rel + self.geom.centroid

    @property
    def xb(self) -> np.ndarray:
        return self.xb_rel + self.geom.centroid

    @property
    def moment_slice(self) -> slice:
        return slice(self.geom.n_vertices * self.k, self.ndof)

    @property
    def basis(self) -> pb.MonomialBasis:
        return pb.MonomialBasis(self.k, self.geom.centroid, self.geom.diameter)

    # DOF-space projectors
    @property
    def PiN_hat(self) -> np.ndarray:
        return self.D @ self.PiN

    @property
    def PiN1_hat(self) -> np.ndarray:
        return self.D[:, : self.nk1] @ self.PiN1

    @property
    def P0_hat(self) -> np.ndarray:
        return self.D @ self.P0

    def at(self, geom: ElementGeometry) -> "LocalSpace":
        """The same space attached to a translated copy of the cell."""
        return dataclasses.replace(self, geom=geom)


def _cond(M):
    try:
        return np.linalg.cond(M)
    except np.linalg.LinAlgError:
        return np.inf


def build_local_space(geom: ElementGeometry | np.ndarray, k: int) -> LocalSpace:
    """Assemble D, B, G, H and all computable projectors for one element."""
    if not isinstance(geom, ElementGeometry):
        geom = element_geometry(geom)
    if k < 1:
        raise ValueError("k must be >= 1")
    nv = geom.n_vertices
    xc, h, area = geom.centroid, geom.diameter, geom.area
    nk, nk1, nk2 = pb.dim(k), pb.dim(k - 1), pb.dim(k - 2)
    ndof = nv * k + nk2
    mom0 = nv * k

    # interior rule and monomial tables
    rule = polygon_rule(geom, 2 * k + 4)
    xq, wq = rule.points, rule.weights
    Vq = pb.eval_scaled(xq, xc, h, k)
    Gxq, Gyq = pb.grad_scaled(xq, xc, h, k)
    H = (Vq * wq[:, None]).T @ Vq
    H = 0.5 * (H + H.T)
    Gt = (Gxq * wq[:, None]).T @ Gxq + (Gyq * wq[:, None]).T @ Gyq
    Gt = 0.5 * (Gt + Gt.T)

    # edge nodes and local DOF indices along each edge
    gl = gauss_lobatto(k + 1).points
    s_nodes = 0.5 * (1.0 + gl)
    a = geom.vertices
    b = np.roll(a, -1, axis=0)
    node_pts = a[:, None, :] * (1 - s_nodes)[None, :, None] + b[:, None, :] * s_nodes[None, :, None]
    edge_dofs = np.empty((nv, k + 1), dtype=np.int64)
    edge_dofs[:, 0] = np.arange(nv)
    edge_dofs[:, -1] = (np.arange(nv) + 1) % nv
    if k > 1:
        edge_dofs[:, 1:-1] = nv + np.arange(nv * (k - 1)).reshape(nv, k - 1)

    # D: DOFs of the monomials
    D = np.zeros((ndof, nk))
    D[:nv] = pb.eval_scaled(a, xc, h, k)
    if k > 1:
        D[nv:mom0] = pb.eval_scaled(node_pts[:, 1:-1].reshape(-1, 2), xc, h, k)
    if nk2:
        D[mom0:] = H[:nk2] / area

    # boundary rule with exact traces
    nqe = k + 4
    L = _edge_trace_matrix(k, nqe)
    tq = gauss_legendre(nqe).points
    sq = 0.5 * (1.0 + tq)
    xb = (a[:, None, :] * (1 - sq)[None, :, None] + b[:, None, :] * sq[None, :, None]).reshape(-1, 2)
    wb = (0.5 * geom.edge_lengths[:, None] * gauss_legendre(nqe).weights[None, :]).ravel()
    nb = np.repeat(geom.normals, nqe, axis=0)
    Tb = np.zeros((nv * nqe, ndof))
    for i in range(nv):
        Tb[i * nqe:(i + 1) * nqe, edge_dofs[i]] = L
    Vb = pb.eval_scaled(xb, xc, h, k)
    Gxb, Gyb = pb.grad_scaled(xb, xc, h, k)
    perimeter = geom.perimeter

    # B: rows are int grad(phi).grad(m_b) via integration by parts;
    # row 0 is the boundary average
    dnm = Gxb * nb[:, :1] + Gyb * nb[:, 1:]
    Bm = (dnm * wb[:, None]).T @ Tb
    if nk2:
        lap = pb.laplacian_map(k)[:nk2] / h**2   # nk2 x nk
        Bm[:, mom0:] -= area * lap.T
    Bm[0] = wb @ Tb / perimeter
    G = Bm @ D

    Gcheck = Gt.copy()
    Gcheck[0] = (wb @ Vb) / perimeter
    scale = np.abs(G).max()
    if np.abs(G - Gcheck).max() > 1e-10 * scale:
        raise SingularProjector(
            f"G = B D consistency check failed (mismatch {np.abs(G - Gcheck).max():.3e})")
    for name, M in (("G", G), ("H", H)):
        cnd = _cond(M)
        if not np.isfinite(cnd) or cnd > COND_LIMIT:
            raise SingularProjector(f"{name} is numerically singular (cond {cnd:.3e})")
    PiN = np.linalg.solve(G, Bm)
    PiN1 = np.linalg.solve(G[:nk1, :nk1], Bm[:nk1]) if nk1 > 1 else Bm[:1].copy()

    # C: int_E phi_j m_a -- DOF moments below k-1, enhancement above
    C = H @ PiN
    if nk2:
        C[:nk2] = 0.0
        C[:nk2, mom0:] = area * np.eye(nk2)
    P0 = np.linalg.solve(H, C)

    # gradient projections: (d phi, m_a) = -(phi, d m_a) + int_dE phi m_a n ds
    Dx, Dy = pb.derivative_maps(k)
    PGk = np.empty((2, nk, ndof))
    PG = np.empty((2, nk1, ndof))
    for d, Dd in enumerate((Dx, Dy)):
        Ed = -(Dd.T / h) @ C + ((Vb * (nb[:, d] * wb)[:, None]).T @ Tb)
        PGk[d] = np.linalg.solve(H, Ed)
        PG[d] = np.linalg.solve(H[:nk1, :nk1], Ed[:nk1])

    return LocalSpace(
        k=k, geom=geom, ndof=ndof, D=D, B=Bm, G=G, H=H, Gtilde=Gt, C=C,
        PiN=PiN, PiN1=PiN1, P0=P0, PG=PG, PGk=PGk,
        xq_rel=xq - xc, wq=wq, Vq=Vq, Gxq=Gxq, Gyq=Gyq,
        xb_rel=xb - xc, wb=wb, nb=nb, Tb=Tb, Vb=Vb, edge_dofs=edge_dofs,
    )


class SpaceCache:
    """Per-mesh local spaces, reusing the matrices of translated identical cells."""

    def __init__(self, mesh: PolyMesh, k: int):
        self.mesh = mesh
        self.k = k
        self._shapes: dict = {}
        self._spaces: list = [None] * mesh.n_cells
        self.hits = 0

    def __getitem__(self, c: int) -> LocalSpace:
        sp = self._spaces[c]
        if sp is None:
            verts = self.mesh.cell_vertices(c)
            geom = element_geometry(verts)
            key = np.round((verts - verts[0]) / geom.diameter, 11).tobytes() + bytes([len(verts)])
            proto = self._shapes.get(key)
            if proto is None:
                sp = build_local_space(geom, self.k)
                self._shapes[key] = sp
            else:
                self.hits += 1
                sp = _rescaled(proto, geom)
            self._spaces[c] = sp
        return sp

    def __len__(self):
        return self.mesh.n_cells

    def __iter__(self):
        for c in range(self.mesh.n_cells):
            yield self[c]


def _rescaled(proto: LocalSpace, geom: ElementGeometry) -> LocalSpace:
    """Reuse ``proto`` for a cell of the same shape, possibly at another scale."""
    s = geom.diameter / proto.geom.diameter
    if abs(s - 1.0) < 1e-12:
        return proto.at(geom)
    return build_local_space(geom, proto.k)


def interpolate(space: LocalSpace, v, degree: int | None = None) -> np.ndarray:
    """Local DOFs of a pointwise-evaluable scalar function ``v(points) -> values``.

    Moments use a rule of the given degree (default 2k + 16) since ``v`` is
    generally not a polynomial.
    """
    geom, k = space.geom, space.k
    nv = geom.n_vertices
    dofs = np.empty(space.ndof)
    dofs[:nv] = v(geom.vertices)
    if k > 1:
        gl = gauss_lobatto(k + 1).points[1:-1]
        s = 0.5 * (1.0 + gl)
        a = geom.vertices
        b = np.roll(a, -1, axis=0)
        pts = a[:, None, :] * (1 - s)[None, :, None] + b[:, None, :] * s[None, :, None]
        dofs[nv:nv * k] = v(pts.reshape(-1, 2))
    nk2 = pb.dim(k - 2)
    if nk2:
        rule = polygon_rule(geom, 2 * k + 16 if degree is None else degree)
        Vm = pb.eval_scaled(rule.points, geom.centroid, geom.diameter, k - 2)
        dofs[nv * k:] = (rule.weights * v(rule.points)) @ Vm / geom.area
    return dofs


def build_projectors(element, k: int) -> LocalSpace:
    """Alias of :func:`build_local_space` (the projector set lives on the space)."""
    return build_local_space(element, k)


def dump_matrices(space: LocalSpace) -> str:
    """Text dump of D, B, G and H for golden comparisons."""
    out = []
    for name in ("D", "B", "G", "H"):
        M = getattr(space, name)
        out.append(f"{name} {M.shape[0]} {M.shape[1]}")
        out.extend(" ".join(f"{x:.16e}" for x in row) for row in M)
    return "\n".join(out) + "\n"
