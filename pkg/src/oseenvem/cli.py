"""Command line front end: ``oseenvem {mesh,solve,convergence,verify}``.

Settings come from built-in defaults, then an optional ``key = value`` config
file (``--config``), then flags; later sources win.

Exit codes: 0 success, 1 verification failure, 2 bad input or mesh
generation failure, 3 solver failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import analysis, lps, verify
from .errors import GenerationFailure, OseenVemError, ParseError, SolverFailure
from .mesh import FAMILIES, generate, generate_voronoi, read_mesh, write_mesh
from .problems import PROBLEMS, get_problem
from .system import VARIANTS

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3
SUBCOMMANDS = ("mesh", "solve", "convergence", "verify")


@dataclass
class RunConfig:
    subcommand: str = "solve"
    problem: str = "example1"
    mu: float | None = None
    gamma: float | None = None
    r1: float | None = None
    r2: float | None = None
    custom: str | None = None
    family: str = "squares"
    n: int = 8
    levels: list = field(default_factory=lambda: [5, 10, 20, 40])
    mesh: str | None = None
    seeds: int | None = None
    lloyd: int = 10
    amplitude: float = 0.2
    k: int = 1
    variant: str = "skew"
    stab_c1: float = 1.0
    stab_c2: float = 1.0
    stab_c3: float = 1.0
    alpha: float = 1.0
    out: str = "."
    seed: int = 0

    # config-file key -> field name
    KEYS = {"stab.c1": "stab_c1", "stab.c2": "stab_c2", "stab.c3": "stab_c3"}

    @classmethod
    def key_for(cls, name: str) -> str:
        inv = {v: k for k, v in cls.KEYS.items()}
        return inv.get(name, name)

    @classmethod
    def field_for(cls, key: str) -> str:
        name = cls.KEYS.get(key, key)
        if name not in {f.name for f in dataclasses.fields(cls)}:
            raise ParseError(f"unknown config key {key!r}", field=key)
        return name

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ParseError(f"unknown subcommand {self.subcommand!r}", field="subcommand")
        if self.problem not in PROBLEMS:
            raise ParseError(f"unknown problem {self.problem!r}", field="problem")
        if self.family not in FAMILIES:
            raise ParseError(f"unknown mesh family {self.family!r}; expected one of {', '.join(FAMILIES)}",
                             field="family")
        if self.variant not in VARIANTS:
            raise ParseError(f"unknown variant {self.variant!r}", field="variant")
        if self.k < 1:
            raise ParseError("k must be >= 1", field="k")
        if self.n < 1 or any(n < 1 for n in self.levels):
            raise ParseError("mesh levels must be >= 1", field="n")
        return self

    def params(self) -> lps.StabilizationParams:
        return lps.StabilizationParams(self.stab_c1, self.stab_c2, self.stab_c3)

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                text = "none"
            elif isinstance(v, list):
                text = ",".join(str(x) for x in v)
            elif isinstance(v, float):
                text = repr(v)
            else:
                text = str(v)
            lines.append(f"{self.key_for(f.name)} = {text}")
        return "\n".join(lines) + "\n"


def _convert(name: str, raw: str):
    """Parse one config value into the type of field ``name``."""
    raw = raw.strip()
    if raw.lower() == "none" and name in ("mu", "gamma", "r1", "r2", "custom", "mesh", "seeds"):
        return None
    try:
        if name == "levels":
            return [int(x) for x in raw.replace(" ", "").split(",") if x]
        if name in ("n", "lloyd", "k", "seed", "seeds"):
            return int(raw)
        if name in ("mu", "gamma", "r1", "r2", "amplitude", "alpha") or name.startswith("stab_"):
            return float(raw)
    except ValueError:
        raise ParseError(f"bad value {raw!r}", field=RunConfig.key_for(name)) from None
    return raw


def parse_config_text(text: str) -> dict:
    out = {}
    for i, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", line=i)
        key, value = (s.strip() for s in line.split("=", 1))
        name = RunConfig.field_for(key)
        out[name] = _convert(name, value)
    return out


def config_from_text(text: str) -> RunConfig:
    return RunConfig(**parse_config_text(text)).validate()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oseenvem", description="Equal-order VEM solver for the Oseen problem")
    p.add_argument("--log-level", default="WARNING")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        # defaults are None so that unset flags do not override the config file
        sp.add_argument("--config", help="key = value settings file")
        sp.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int)

    def meshing(sp):
        sp.add_argument("--family", help=f"one of {', '.join(FAMILIES)}")
        sp.add_argument("--n", type=int, help="elements per side (voronoi: sqrt of seed count)")
        sp.add_argument("--seeds", type=int, help="voronoi seed count, overrides --n")
        sp.add_argument("--lloyd", type=int, help="voronoi Lloyd iterations")
        sp.add_argument("--amplitude", type=float, help="distorted family perturbation")

    def physics(sp):
        sp.add_argument("--problem", help=f"one of {', '.join(PROBLEMS)}")
        sp.add_argument("--custom", help="module:factory for --problem custom")
        sp.add_argument("--mu", type=float)
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--r1", type=float)
        sp.add_argument("--r2", type=float)
        sp.add_argument("--k", type=int)
        sp.add_argument("--variant", help="convective form: skew or hat")
        sp.add_argument("--c1", dest="stab_c1", type=float)
        sp.add_argument("--c2", dest="stab_c2", type=float)
        sp.add_argument("--c3", dest="stab_c3", type=float)

    sp = sub.add_parser("mesh", help="generate a mesh file")
    common(sp)
    meshing(sp)

    sp = sub.add_parser("solve", help="single solve with solution dump and error report")
    common(sp)
    meshing(sp)
    physics(sp)
    sp.add_argument("--mesh", help="read the mesh from this file instead of generating it")
    sp.add_argument("--alpha", type=float, help="pressure weight in the energy diagnostic")

    sp = sub.add_parser("convergence", help="convergence study over mesh levels")
    common(sp)
    meshing(sp)
    physics(sp)
    sp.add_argument("--levels", help="comma separated n values, e.g. 5,10,20")

    sp = sub.add_parser("verify", help="run the self-check property suites")
    sp.add_argument("--verbose", "-v", action="store_true", help="per-property timing")
    sp.add_argument("--only", action="append", choices=list(verify.PROPERTIES), help="run a subset")
    sp.add_argument("--inject-fault", choices=["quadrature"], help=argparse.SUPPRESS)
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read config: {exc}") from None
        values.update(parse_config_text(text))
    values["subcommand"] = args.subcommand
    names = {f.name for f in dataclasses.fields(RunConfig)}
    for name, v in vars(args).items():
        if name in names and v is not None and name != "subcommand":
            values[name] = _convert(name, v) if name == "levels" else v
    return RunConfig(**values).validate()


def _mesh_for(cfg: RunConfig, n: int):
    if cfg.family == "voronoi" and cfg.seeds is not None:
        return generate_voronoi(cfg.seeds, cfg.lloyd, cfg.seed)
    return generate(cfg.family, n, seed=cfg.seed, amplitude=cfg.amplitude, lloyd=cfg.lloyd)


def _problem(cfg: RunConfig):
    return get_problem(cfg.problem, cfg.mu, cfg.gamma, cfg.r1, cfg.r2, k=cfg.k, custom=cfg.custom)


def cmd_mesh(cfg: RunConfig) -> int:
    mesh = _mesh_for(cfg, cfg.n)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tag = f"s{cfg.seeds}" if cfg.family == "voronoi" and cfg.seeds is not None else f"n{cfg.n}"
    path = out / f"{cfg.family}_{tag}.mesh"
    write_mesh(mesh, path)
    print(f"{path}: {mesh.n_cells} cells, {mesh.n_vertices} vertices, h={mesh.h:.4g}")
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    mesh = read_mesh(cfg.mesh) if cfg.mesh else _mesh_for(cfg, cfg.n)
    problem = _problem(cfg)
    sol, rep, er = analysis.solve_and_report(mesh, cfg.k, problem, cfg.params(), cfg.variant, cfg.alpha)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    mesh_name = cfg.mesh or f"{cfg.family}:{cfg.n}"
    (out / "solution.txt").write_text(sol.dump(mesh_name, problem.name))
    report = {"problem": problem.name, "mesh": mesh_name, "k": cfg.k, "variant": cfg.variant,
              "solve": dataclasses.asdict(rep)}
    if er is not None:
        report["errors"] = er.as_dict()
        (out / "errors.json").write_text(json.dumps(report, indent=2) + "\n")
        print(f"EuH1={er.EuH1:.6e} EuL2={er.EuL2:.6e} EpL2={er.EpL2:.6e}")
    print(f"solved {rep.n_unknowns} unknowns with {rep.method}, residual {rep.relative_residual:.2e}")
    return EXIT_OK


def _write_tables(table, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    analysis.emit_table(table, out / "table.csv", "csv")
    analysis.emit_table(table, out / "table.md", "md")
    analysis.emit_plotdata(table, out / "plotdata.txt")


def cmd_convergence(cfg: RunConfig) -> int:
    problem = _problem(cfg)
    out = Path(cfg.out)
    try:
        table = analysis.convergence_study(problem, lambda n: _mesh_for(cfg, n), cfg.k, cfg.levels,
                                           cfg.params(), cfg.variant, label=problem.name)
    except analysis.StudyFailure as exc:
        _write_tables(exc.table, out)
        print(f"study failed at {exc}; partial table with {len(exc.table)} rows written", file=sys.stderr)
        return EXIT_SOLVER
    _write_tables(table, out)
    sys.stdout.write(analysis.table_markdown(table))
    return EXIT_OK


def cmd_verify(verbose: bool = False, only=None, inject=None) -> int:
    results = verify.run_all(only, inject=inject)
    for r in results:
        line = f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}"
        if verbose:
            line += f" ({r.seconds:.2f}s)"
        print(line)
    failed = [r.name for r in results if not r.ok]
    if failed:
        print("failing properties: " + ", ".join(failed))
        return EXIT_VERIFY
    print(f"all {len(results)} properties pass")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    if args.subcommand == "verify":
        return cmd_verify(args.verbose, args.only, args.inject_fault)
    try:
        cfg = resolve_config(args)
        if args.dump_config:
            sys.stdout.write(cfg.to_text())
            return EXIT_OK
        return {"mesh": cmd_mesh, "solve": cmd_solve, "convergence": cmd_convergence}[cfg.subcommand](cfg)
    except SolverFailure as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (GenerationFailure, ParseError, OseenVemError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
