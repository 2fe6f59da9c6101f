"""Scaled monomials m_b(x) = ((x - x_E) / h_E)^b in graded-lex order.

Ordering for degree k: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
i.e. within each total degree d the x-exponent decreases from d to 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadrature import polygon_rule


def dim(k: int) -> int:
    """dim P_k in 2D; 0 for k < 0."""
    return (k + 1) * (k + 2) // 2 if k >= 0 else 0


@lru_cache(maxsize=None)
def exponents(k: int) -> np.ndarray:
    out = [(d - j, j) for d in range(k + 1) for j in range(d + 1)]
    arr = np.array(out, dtype=np.int64).reshape(-1, 2)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def index_of(k: int) -> dict:
    return {tuple(map(int, e)): i for i, e in enumerate(exponents(k))}


@lru_cache(maxsize=None)
def derivative_maps(k: int):
    """Unscaled derivative maps on coefficient vectors of degree k.

    Returns (Dx, Dy), each (dim k, dim k), with d/dxi (sum c_b xi^b) expressed
    in the same basis: (Dx @ c)[a] is the coefficient of xi^a.  Divide by h_E to
    get derivatives in physical coordinates.
    """
    ex = exponents(k)
    idx = index_of(k)
    n = len(ex)
    Dx = np.zeros((n, n))
    Dy = np.zeros((n, n))
    for j, (a, b) in enumerate(ex):
        if a > 0:
            Dx[idx[(a - 1, b)], j] = a
        if b > 0:
            Dy[idx[(a, b - 1)], j] = b
    Dx.setflags(write=False)
    Dy.setflags(write=False)
    return Dx, Dy


@lru_cache(maxsize=None)
def laplacian_map(k: int) -> np.ndarray:
    """Unscaled Laplacian on degree-k coefficients (divide by h_E^2)."""
    Dx, Dy = derivative_maps(k)
    L = Dx @ Dx + Dy @ Dy
    L.setflags(write=False)
    return L


def _powers(xi: np.ndarray, k: int) -> np.ndarray:
    """xi^0..xi^k column-wise for a 1D array."""
    out = np.ones((len(xi), k + 1))
    for p in range(1, k + 1):
        out[:, p] = out[:, p - 1] * xi
    return out


def eval_scaled(points: np.ndarray, centroid, h: float, k: int) -> np.ndarray:
    """Matrix (npts, dim k) of scaled monomials at ``points``."""
    points = np.atleast_2d(points)
    xi = (points[:, 0] - centroid[0]) / h
    eta = (points[:, 1] - centroid[1]) / h
    px, py = _powers(xi, k), _powers(eta, k)
    ex = exponents(k)
    return px[:, ex[:, 0]] * py[:, ex[:, 1]]


def grad_scaled(points: np.ndarray, centroid, h: float, k: int):
    """Physical gradients of the scaled monomials: two (npts, dim k) arrays."""
    V = eval_scaled(points, centroid, h, max(k - 1, 0))
    Dx, Dy = derivative_maps(k)
    nk1 = dim(k - 1)
    return (V @ Dx[:nk1]) / h, (V @ Dy[:nk1]) / h


@dataclass(frozen=True)
class MonomialBasis:
    degree: int
    centroid: np.ndarray
    h: float

    @property
    def size(self) -> int:
        return dim(self.degree)

    @property
    def exponents(self) -> np.ndarray:
        return exponents(self.degree)

    def eval(self, points) -> np.ndarray:
        return eval_scaled(np.asarray(points, dtype=float), self.centroid, self.h, self.degree)

    def grad(self, points):
        return grad_scaled(np.asarray(points, dtype=float), self.centroid, self.h, self.degree)

    def gradient_map(self):
        """(Gx, Gy), each (dim k-1, dim k): physical derivative coefficients."""
        Dx, Dy = derivative_maps(self.degree)
        n1 = dim(self.degree - 1)
        return Dx[:n1] / self.h, Dy[:n1] / self.h

    def laplacian_map(self):
        """(dim k-2, dim k) physical Laplacian coefficients."""
        return laplacian_map(self.degree)[: dim(self.degree - 2)] / self.h**2


@dataclass(frozen=True)
class CalculusTables:
    H: np.ndarray          # int_E m_a m_b
    Gtilde: np.ndarray     # int_E grad m_a . grad m_b
    gx: np.ndarray         # physical d/dx map, dim k-1 x dim k
    gy: np.ndarray
    lap: np.ndarray        # dim k-2 x dim k
    divergence: np.ndarray  # dim k-1 x 2 dim k, acting on [c_x; c_y]


def build_tables(basis: MonomialBasis, geom) -> CalculusTables:
    k = basis.degree
    rule = polygon_rule(geom, 2 * k)
    V = basis.eval(rule.points)
    H = (V * rule.weights[:, None]).T @ V
    H = 0.5 * (H + H.T)
    Gx, Gy = basis.grad(rule.points)
    Gt = (Gx * rule.weights[:, None]).T @ Gx + (Gy * rule.weights[:, None]).T @ Gy
    Gt = 0.5 * (Gt + Gt.T)
    gx, gy = basis.gradient_map()
    return CalculusTables(H, Gt, gx, gy, basis.laplacian_map(), np.hstack([gx, gy]))


def integrate_monomials(geom, k: int) -> np.ndarray:
    """Integrals of every scaled monomial of degree <= 2k over the element."""
    rule = polygon_rule(geom, 2 * k)
    V = eval_scaled(rule.points, geom.centroid, geom.diameter, 2 * k)
    return rule.weights @ V
