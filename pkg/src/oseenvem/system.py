"""Global assembly of the stabilized saddle-point system and its direct solve.

Unknowns are ordered component-major: [u1 (n) | u2 (n) | p (n) | lambda],
where n is the number of global scalar DOFs and lambda is the multiplier of the
zero-mean pressure constraint.
"""

from __future__ import annotations

import logging
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from . import forms, lps
from .errors import DimensionMismatch, SingularMatrix, SolverFailure
from .mesh import PolyMesh
from .problems import OseenProblem
from .vemspace import DofLayout, SpaceCache, build_dof_layout

log = logging.getLogger(__name__)

DENSE_LIMIT = 3000
RESIDUAL_TOL = 1e-10
VARIANTS = ("skew", "hat")


@dataclass
class GlobalSystem:
    matrix: sps.csr_matrix
    rhs: np.ndarray
    layout: DofLayout
    spaces: SpaceCache
    variant: str
    fixed: np.ndarray = None          # bool mask over all unknowns
    fixed_values: np.ndarray = None
    parts: dict = field(default_factory=dict)

    @property
    def n_scalar(self) -> int:
        return self.layout.n_dofs

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def velocity_block(self):
        n2 = 2 * self.n_scalar
        return self.matrix[:n2, :n2]


@dataclass
class SolveReport:
    relative_residual: float
    method: str
    n_unknowns: int
    nnz: int
    refined: bool
    condition_warning: bool
    seconds: float


@dataclass
class Solution:
    layout: DofLayout
    u1: np.ndarray
    u2: np.ndarray
    p: np.ndarray
    multiplier: float = 0.0

    @property
    def k(self) -> int:
        return self.layout.k

    @classmethod
    def from_vector(cls, layout: DofLayout, x: np.ndarray) -> "Solution":
        n = layout.n_dofs
        lam = float(x[3 * n]) if len(x) > 3 * n else 0.0
        return cls(layout, x[:n].copy(), x[n:2 * n].copy(), x[2 * n:3 * n].copy(), lam)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.u1, self.u2, self.p, [self.multiplier]])

    def dump(self, mesh_file: str = "-", problem_id: str = "-") -> str:
        lines = [f"# k {self.k}", f"# mesh {mesh_file}", f"# problem {problem_id}",
                 f"# ndofs {self.layout.n_dofs}", "# dof u1 u2 p"]
        lines += [f"{i} {a!r} {b!r} {c!r}" for i, (a, b, c) in
                  enumerate(zip(self.u1.tolist(), self.u2.tolist(), self.p.tolist()))]
        return "\n".join(lines) + "\n"


class _Triplets:
    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add(self, ri, ci, M):
        self.rows.append(np.repeat(ri, len(ci)))
        self.cols.append(np.tile(ci, len(ri)))
        self.vals.append(np.asarray(M).ravel())

    def matrix(self, n) -> sps.csr_matrix:
        if not self.rows:
            return sps.csr_matrix((n, n))
        r = np.concatenate(self.rows)
        c = np.concatenate(self.cols)
        v = np.concatenate(self.vals)
        return sps.coo_matrix((v, (r, c)), shape=(n, n)).tocsr()


def _batched_values(spaces, fn, attr):
    """Evaluate ``fn`` once on the stacked points of every element, split per element."""
    pts = [getattr(sp, attr) for sp in spaces]
    stacked = np.vstack(pts)
    vals = np.asarray(fn(stacked), dtype=float)
    if vals.ndim == 1:
        vals = np.broadcast_to(vals, (len(stacked), 2))
    return np.split(vals, np.cumsum([len(p) for p in pts])[:-1])


def assemble(mesh: PolyMesh, k: int, problem: OseenProblem,
             params: lps.StabilizationParams | None = None, variant: str = "skew",
             spaces: SpaceCache | None = None, layout: DofLayout | None = None,
             keep_parts: bool = False) -> GlobalSystem:
    """Build the stabilized system matrix and load vector (no boundary conditions yet)."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown convective variant {variant!r} (expected one of {VARIANTS})")
    params = params or lps.StabilizationParams()
    layout = layout or build_dof_layout(mesh, k)
    spaces = spaces or SpaceCache(mesh, k)
    if layout.k != k or spaces.k != k or layout.mesh is not spaces.mesh:
        raise DimensionMismatch("DOF layout, local spaces and k are inconsistent")
    if len(layout.cell_dofs) != mesh.n_cells:
        raise DimensionMismatch("DOF layout does not match the mesh")
    n = layout.n_dofs
    N = 3 * n + 1
    mu, gamma = problem.mu, problem.gamma

    spl = list(spaces)
    Bq = _batched_values(spl, problem.B, "xq")
    Bb = _batched_values(spl, problem.B, "xb")
    fq = _batched_values(spl, problem.f, "xq")

    T = _Triplets()
    named = {name: _Triplets() for name in ("C",)} if keep_parts else {}
    rhs = np.zeros(N)
    lam = 3 * n
    for c, sp in enumerate(spl):
        g = layout.cell_dofs[c]
        ne = len(g)
        if ne != sp.ndof:
            raise DimensionMismatch(f"cell {c}: layout has {ne} DOFs, space has {sp.ndof}")
        Cm = forms.convective_matrix(sp, Bq[c], variant, Bb[c])
        Kv = Cm.copy()
        if mu:
            Kv += forms.local_a(sp, mu)
        if gamma:
            Kv += forms.local_d(sp, gamma)
        B_E = lps.sup_norm(sp, Bq[c], Bb[c])
        if B_E > 0 and params.c1 > 0:
            Kv += lps.local_L1(sp, None, params, B_E=B_E)
        L2 = lps.local_L2(sp, params)
        Bm = forms.local_b(sp)
        Ke = np.zeros((3 * ne, 3 * ne))
        Ke[:2 * ne, :2 * ne] = L2
        Ke[:ne, :ne] += Kv
        Ke[ne:2 * ne, ne:2 * ne] += Kv
        Ke[:2 * ne, 2 * ne:] = -Bm
        Ke[2 * ne:, :2 * ne] = Bm.T
        Ke[2 * ne:, 2 * ne:] = lps.local_L3(sp, params)
        gi = np.concatenate([g, n + g, 2 * n + g])
        T.add(gi, gi, Ke)
        mean_row = sp.C[0]
        T.add(np.array([lam]), 2 * n + g, mean_row[None, :])
        T.add(2 * n + g, np.array([lam]), mean_row[:, None])
        F = forms.local_load(sp, fq[c])
        np.add.at(rhs, g, F[:, 0])
        np.add.at(rhs, n + g, F[:, 1])
        if keep_parts:
            gv = np.concatenate([g, n + g])
            Cb = np.zeros((2 * ne, 2 * ne))
            Cb[:ne, :ne] = Cm
            Cb[ne:, ne:] = Cm
            named["C"].add(gv, gv, Cb)
    K = T.matrix(N)
    parts = {name: t.matrix(N) for name, t in named.items()}
    return GlobalSystem(K, rhs, layout, spaces, variant, parts=parts)


def boundary_values(layout: DofLayout, g) -> np.ndarray:
    """(n_boundary, 2) Dirichlet values at the boundary nodes of ``layout``."""
    idx = np.flatnonzero(layout.boundary)
    return np.asarray(g(layout.coords[idx]), dtype=float).reshape(len(idx), 2)


def apply_dirichlet(system: GlobalSystem, g) -> None:
    """Fix boundary velocity DOFs to the nodal values of ``g``, eliminating symmetrically."""
    layout = system.layout
    n = layout.n_dofs
    N = system.size
    idx = np.flatnonzero(layout.boundary)
    vals = boundary_values(layout, g)
    fixed = np.zeros(N, dtype=bool)
    fixed[idx] = True
    fixed[n + idx] = True
    xg = np.zeros(N)
    xg[idx] = vals[:, 0]
    xg[n + idx] = vals[:, 1]
    K = system.matrix
    rhs = system.rhs - K @ xg
    keep = sps.diags((~fixed).astype(float))
    K = (keep @ K @ keep + sps.diags(fixed.astype(float))).tocsr()
    K.eliminate_zeros()
    rhs[fixed] = xg[fixed]
    system.matrix = K
    system.rhs = rhs
    system.fixed = fixed
    system.fixed_values = xg


def _residual(K, x, b) -> float:
    nb = np.linalg.norm(b)
    r = np.linalg.norm(K @ x - b)
    return r / nb if nb > 0 else r


def _sparse_factor(A):
    """SuperLU with a symmetric-pattern ordering; COLAMD with partial pivoting as fallback."""
    attempts = (("MMD_AT_PLUS_A", 0.01, True), ("COLAMD", 1.0, False))
    last = None
    for order, thresh, sym in attempts:
        try:
            lu = spla.splu(A, permc_spec=order, diag_pivot_thresh=thresh,
                           options={"SymmetricMode": sym})
        except RuntimeError as exc:
            last = exc
            continue
        yield f"sparse-lu/{order}", lu.solve
    if last is not None:
        raise SingularMatrix(f"sparse factorization failed: {last}")


def _dense_factor(A):
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu = sla.lu_factor(A.toarray(), check_finite=False)
        except (sla.LinAlgWarning, np.linalg.LinAlgError) as exc:
            raise SingularMatrix(f"dense factorization failed: {exc}") from exc
    piv = np.abs(np.diag(lu[0]))
    if piv.min() <= 1e-14 * piv.max():
        raise SingularMatrix(f"zero pivot in dense factorization (min/max {piv.min() / piv.max():.2e})")
    return lu, piv.min() < 1e-10 * piv.max()


def solve(system: GlobalSystem, dense_limit: int = DENSE_LIMIT) -> tuple[Solution, SolveReport]:
    """Direct solve of the free block, with one step of iterative refinement if needed."""
    t0 = time.perf_counter()
    K = system.matrix
    b = system.rhs
    N = K.shape[0]
    if not np.all(np.isfinite(K.data)) or not np.all(np.isfinite(b)):
        raise SolverFailure("system contains non-finite entries")
    if system.fixed is not None:
        free = np.flatnonzero(~system.fixed)
        A = K[free][:, free].tocsc()
        rhs = b[free]
    else:
        free = np.arange(N)
        A = K.tocsc()
        rhs = b
    cond_warn = False
    res = np.inf
    refined = False

    def attempts():
        if len(free) <= dense_limit:
            lu, warn = _dense_factor(A)
            yield "dense-lu", (lambda r: sla.lu_solve(lu, r, check_finite=False)), warn
        else:
            for name, fn in _sparse_factor(A):
                yield name, fn, False

    method = "none"
    for method, do_solve, cond_warn in attempts():
        y = do_solve(rhs)
        res = _residual(A, y, rhs)
        refined = False
        if not np.isfinite(res) or res > RESIDUAL_TOL:
            y = y + do_solve(rhs - A @ y)
            res = _residual(A, y, rhs)
            refined = True
        if np.isfinite(res) and res <= RESIDUAL_TOL:
            break
        log.warning("%s left relative residual %.2e", method, res)
    if not np.isfinite(res) or res > RESIDUAL_TOL:
        raise SolverFailure(f"relative residual {res:.3e} exceeds {RESIDUAL_TOL:.0e} ({method}, N={N})")
    x = b.copy() if system.fixed is not None else np.zeros(N)
    x[free] = y
    res_full = _residual(K, x, b)
    report = SolveReport(float(max(res, res_full)), method, int(N), int(K.nnz), bool(refined),
                         bool(cond_warn), time.perf_counter() - t0)
    log.info("solved N=%d with %s, residual %.2e in %.2fs", N, method, report.relative_residual, report.seconds)
    return Solution.from_vector(system.layout, x), report


def solve_problem(mesh: PolyMesh, k: int, problem: OseenProblem,
                  params: lps.StabilizationParams | None = None, variant: str = "skew",
                  spaces: SpaceCache | None = None):
    """Assemble, impose u = g on the boundary and solve; returns (solution, report, system)."""
    system = assemble(mesh, k, problem, params, variant, spaces=spaces)
    apply_dirichlet(system, problem.g)
    sol, rep = solve(system)
    return sol, rep, system
