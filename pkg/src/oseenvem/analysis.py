"""Error measures, the energy-norm diagnostic and convergence tables."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import lps
from .errors import OseenVemError
from .mesh import PolyMesh
from .problems import OseenProblem
from .system import Solution, solve_problem
from .vemspace import SpaceCache

log = logging.getLogger(__name__)

MEASURES = ("EuH1", "EuL2", "EpL2")
CSV_HEADER = "h,EuH1,rateH1,EuL2,rateL2,EpL2,rateP"


@dataclass
class ErrorReport:
    h: float
    EuH1: float
    EuL2: float
    EpL2: float
    n_dofs: int = 0
    n_unknowns: int = 0
    seconds: float = 0.0
    energy: float | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("h", "EuH1", "EuL2", "EpL2", "n_dofs", "n_unknowns", "seconds", "energy")}


def _spaces(mesh, k, spaces):
    if spaces is None:
        return SpaceCache(mesh, k)
    return spaces


def compute_errors(mesh: PolyMesh, k: int, solution: Solution, problem: OseenProblem,
                   spaces: SpaceCache | None = None) -> ErrorReport:
    """H1 seminorm error of PiN_k u_h and L2 errors of Pi0_k u_h, Pi0_k p_h (pressures mean-free)."""
    problem.require_exact()
    spaces = _spaces(mesh, k, spaces)
    layout = solution.layout
    spl = list(spaces)
    xs = np.vstack([sp.xq for sp in spl])
    ws = np.concatenate([sp.wq for sp in spl])
    splits = np.cumsum([len(sp.wq) for sp in spl])[:-1]
    u_ex = np.split(problem.u(xs), splits)
    gu_ex = np.split(problem.grad_u(xs), splits)
    p_ex_all = problem.p(xs)
    area = ws.sum()
    p_ex_all = p_ex_all - (ws @ p_ex_all) / area
    p_ex = np.split(p_ex_all, splits)

    # discrete pressure mean from Pi0_k p_h
    ph_vals = []
    for c, sp in enumerate(spl):
        g = layout.cell_dofs[c]
        ph_vals.append(sp.Vq @ (sp.P0 @ solution.p[g]))
    ph_all = np.concatenate(ph_vals)
    ph_mean = (ws @ ph_all) / area
    ph_vals = np.split(ph_all - ph_mean, splits)

    eh1 = el2 = ep = 0.0
    for c, sp in enumerate(spl):
        g = layout.cell_dofs[c]
        w = sp.wq
        for d, ud in enumerate((solution.u1, solution.u2)):
            loc = ud[g]
            cn = sp.PiN @ loc
            ex = gu_ex[c][:, d, 0] - sp.Gxq @ cn
            ey = gu_ex[c][:, d, 1] - sp.Gyq @ cn
            eh1 += w @ (ex**2 + ey**2)
            e0 = u_ex[c][:, d] - sp.Vq @ (sp.P0 @ loc)
            el2 += w @ e0**2
        ep += w @ (p_ex[c] - ph_vals[c]) ** 2
    return ErrorReport(mesh.h, math.sqrt(eh1), math.sqrt(el2), math.sqrt(ep),
                       n_dofs=layout.n_dofs, n_unknowns=3 * layout.n_dofs + 1)


def locate_points(mesh: PolyMesh, points: np.ndarray) -> np.ndarray:
    """Index of a cell containing each point (even-odd rule, boundary counts); -1 if outside."""
    pts = np.asarray(points, dtype=float)
    owner = np.full(len(pts), -1)
    for c in range(mesh.n_cells):
        V = mesh.cell_vertices(c)
        lo, hi = V.min(0) - 1e-12, V.max(0) + 1e-12
        cand = np.where((owner < 0) & np.all((pts >= lo) & (pts <= hi), axis=1))[0]
        if cand.size == 0:
            continue
        x, y = pts[cand, 0], pts[cand, 1]
        inside = np.zeros(cand.size, dtype=bool)
        on_edge = np.zeros(cand.size, dtype=bool)
        for a, b in zip(V, np.roll(V, -1, axis=0)):
            cross = (a[1] > y) != (b[1] > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xi = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
            inside ^= cross & (x < xi)
            d = b - a
            t = ((x - a[0]) * d[0] + (y - a[1]) * d[1]) / (d @ d)
            dist = np.abs((x - a[0]) * d[1] - (y - a[1]) * d[0]) / np.sqrt(d @ d)
            on_edge |= (dist <= 1e-12) & (t >= -1e-12) & (t <= 1 + 1e-12)
        owner[cand[inside | on_edge]] = c
    return owner


def sample_solution(mesh: PolyMesh, k: int, solution: Solution, points: np.ndarray,
                    spaces: SpaceCache | None = None) -> np.ndarray:
    """Pi0_k of (u1, u2, p) evaluated at points; rows are points."""
    from . import polybasis as pb

    spaces = _spaces(mesh, k, spaces)
    pts = np.asarray(points, dtype=float)
    owner = locate_points(mesh, pts)
    if np.any(owner < 0):
        raise ValueError("sample points outside the mesh")
    out = np.empty((len(pts), 3))
    g_all = solution.layout.cell_dofs
    for c in np.unique(owner):
        sel = owner == c
        sp = spaces[c]
        V = pb.eval_scaled(pts[sel], sp.centroid, sp.h, k)
        g = g_all[c]
        for j, vals in enumerate((solution.u1, solution.u2, solution.p)):
            out[sel, j] = V @ (sp.P0 @ vals[g])
    return out


def energy_norm_diagnostic(mesh: PolyMesh, k: int, solution: Solution, problem: OseenProblem,
                           params: lps.StabilizationParams | None = None, alpha: float = 1.0,
                           spaces: SpaceCache | None = None) -> float:
    """Squared mesh-dependent energy norm of a discrete pair (v, q).

    mu |grad v|^2 + gamma |v|^2 + alpha |q|^2 plus the three stabilization forms;
    volume terms use PiN_k v for gradients and Pi0_k for values.
    """
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    params = params or lps.StabilizationParams()
    spaces = _spaces(mesh, k, spaces)
    layout = solution.layout
    total = 0.0
    for c, sp in enumerate(spaces):
        g = layout.cell_dofs[c]
        v = [solution.u1[g], solution.u2[g]]
        q = solution.p[g]
        for vd in v:
            cn = sp.PiN @ vd
            total += problem.mu * cn @ sp.Gtilde @ cn
            c0 = sp.P0 @ vd
            total += problem.gamma * c0 @ sp.H @ c0
        cq = sp.P0 @ q
        total += alpha * cq @ sp.H @ cq
        B_E = lps.sup_norm(sp, problem.B)
        if B_E > 0:
            L1 = lps.local_L1(sp, None, params, B_E=B_E)
            total += sum(vd @ L1 @ vd for vd in v)
        vv = np.concatenate(v)
        total += vv @ lps.local_L2(sp, params) @ vv
        total += q @ lps.local_L3(sp, params) @ q
    return float(total)


def rates(errors: Sequence[float], hs: Sequence[float]) -> list:
    """Pairwise observed orders; the first entry is None."""
    out = [None]
    for i in range(1, len(errors)):
        e0, e1, h0, h1 = errors[i - 1], errors[i], hs[i - 1], hs[i]
        if e0 > 0 and e1 > 0 and h0 != h1:
            out.append(math.log(e0 / e1) / math.log(h0 / h1))
        else:
            out.append(float("nan"))
    return out


@dataclass
class ConvergenceTable:
    reports: list = field(default_factory=list)
    label: str = ""

    @property
    def hs(self):
        return [r.h for r in self.reports]

    def errors(self, measure: str):
        return [getattr(r, measure) for r in self.reports]

    def rates(self, measure: str):
        return rates(self.errors(measure), self.hs)

    def final_rates(self) -> dict:
        return {m: self.rates(m)[-1] for m in MEASURES}

    def rows(self):
        rH, rL, rP = (self.rates(m) for m in MEASURES)
        for i, r in enumerate(self.reports):
            yield (r.h, r.EuH1, rH[i], r.EuL2, rL[i], r.EpL2, rP[i])

    def __len__(self):
        return len(self.reports)


class StudyFailure(OseenVemError):
    def __init__(self, message, table: ConvergenceTable, level: int):
        super().__init__(message)
        self.table = table
        self.level = level


def convergence_study(problem: OseenProblem, meshes: Sequence[PolyMesh] | Callable[[int], PolyMesh],
                      k: int, levels: Sequence[int] | None = None,
                      params: lps.StabilizationParams | None = None, variant: str = "skew",
                      cache: dict | None = None, label: str = "") -> ConvergenceTable:
    """Solve on each mesh in turn and tabulate errors and pairwise rates.

    ``meshes`` is a list of meshes or a factory called with each entry of
    ``levels``.  ``cache`` (keyed by mesh identity) lets repeated studies reuse
    local spaces.
    """
    if callable(meshes):
        if levels is None:
            raise ValueError("levels are required with a mesh factory")
        mesh_list = [meshes(n) for n in levels]
    else:
        mesh_list = list(meshes)
    if len(mesh_list) < 2:
        raise ValueError("a convergence study needs at least 2 levels")
    table = ConvergenceTable(label=label)
    for i, mesh in enumerate(mesh_list):
        t0 = time.perf_counter()
        spaces = None
        if cache is not None:
            key = (id(mesh), k)
            spaces = cache.get(key)
            if spaces is None:
                spaces = cache[key] = SpaceCache(mesh, k)
        try:
            sol, rep, system = solve_problem(mesh, k, problem, params, variant, spaces=spaces)
            er = compute_errors(mesh, k, sol, problem, spaces=system.spaces)
        except OseenVemError as exc:
            raise StudyFailure(f"level {i} (h={mesh.h:.4g}): {exc}", table, i) from exc
        er.n_unknowns = rep.n_unknowns
        er.seconds = time.perf_counter() - t0
        table.reports.append(er)
        log.info("level %d h=%.4g: H1 %.3e L2 %.3e p %.3e (%.1fs)", i, er.h, er.EuH1, er.EuL2, er.EpL2, er.seconds)
    return table


def _fmt_rate(r):
    return "" if r is None else f"{r:.2f}"


def table_csv(table: ConvergenceTable) -> str:
    lines = [CSV_HEADER]
    for h, a, ra, b, rb, c, rc in table.rows():
        lines.append(",".join([repr(h), f"{a:.6e}", _fmt_rate(ra), f"{b:.6e}", _fmt_rate(rb),
                               f"{c:.6e}", _fmt_rate(rc)]))
    return "\n".join(lines) + "\n"


def table_markdown(table: ConvergenceTable) -> str:
    head = "| h | E^u_H1 | rate | E^u_L2 | rate | E^p_L2 | rate |"
    sep = "|---|---|---|---|---|---|---|"
    lines = [head, sep]
    for h, a, ra, b, rb, c, rc in table.rows():
        lines.append(f"| {h:.4e} | {a:.6e} | {_fmt_rate(ra) or '-'} | {b:.6e} | {_fmt_rate(rb) or '-'} "
                     f"| {c:.6e} | {_fmt_rate(rc) or '-'} |")
    return "\n".join(lines) + "\n"


def plotdata(table: ConvergenceTable) -> str:
    lines = ["# measure log10_h log10_error"]
    for m in MEASURES:
        for h, e in zip(table.hs, table.errors(m)):
            le = math.log10(e) if e > 0 else float("-inf")
            lines.append(f"{m} {math.log10(h):.12g} {le:.12g}")
    return "\n".join(lines) + "\n"


def emit_table(table: ConvergenceTable, path, fmt: str = "csv") -> Path:
    if fmt == "csv":
        text = table_csv(table)
    elif fmt in ("md", "markdown"):
        text = table_markdown(table)
    else:
        raise ValueError(f"unknown table format {fmt!r}")
    path = Path(path)
    path.write_text(text)
    return path


def emit_plotdata(table: ConvergenceTable, path) -> Path:
    path = Path(path)
    path.write_text(plotdata(table))
    return path


def solve_and_report(mesh: PolyMesh, k: int, problem: OseenProblem,
                     params: lps.StabilizationParams | None = None, variant: str = "skew",
                     alpha: float = 1.0):
    """One assembly and solve; errors and the energy diagnostic when exact data exists.

    Returns (solution, solve report, error report or None).
    """
    t0 = time.perf_counter()
    sol, rep, system = solve_problem(mesh, k, problem, params, variant)
    if not problem.has_exact:
        return sol, rep, None
    er = compute_errors(mesh, k, sol, problem, spaces=system.spaces)
    er.n_unknowns = rep.n_unknowns
    er.energy = energy_norm_diagnostic(mesh, k, sol, problem, params, alpha, spaces=system.spaces)
    er.seconds = time.perf_counter() - t0
    return sol, rep, er
