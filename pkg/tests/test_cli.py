import json
import math

import pytest
from hypothesis import given, strategies as st

from oseenvem import cli
from oseenvem.errors import ParseError
from oseenvem.mesh import read_mesh


def test_mesh_squares(tmp_path, capsys):
    assert cli.main(["mesh", "--family", "squares", "--n", "4", "--out", str(tmp_path)]) == 0
    assert read_mesh(tmp_path / "squares_n4.mesh").n_cells == 16


def test_mesh_voronoi_deterministic(tmp_path):
    args = ["mesh", "--family", "voronoi", "--seeds", "64", "--lloyd", "3", "--seed", "7"]
    cli.main(args + ["--out", str(tmp_path / "a")])
    cli.main(args + ["--out", str(tmp_path / "b")])
    a = (tmp_path / "a" / "voronoi_s64.mesh").read_bytes()
    assert a == (tmp_path / "b" / "voronoi_s64.mesh").read_bytes()


def test_mesh_invalid_family(tmp_path, capsys):
    assert cli.main(["mesh", "--family", "hexes", "--out", str(tmp_path)]) == 2
    assert "hexes" in capsys.readouterr().err


def test_solve_example1_report(tmp_path):
    out = tmp_path / "run"
    args = ["solve", "--problem", "example1", "--mu", "1", "--gamma", "1", "--family", "squares",
            "--n", "10", "--k", "1", "--out", str(out)]
    assert cli.main(args) == 0
    rep = json.loads((out / "errors.json").read_text())
    assert all(math.isfinite(rep["errors"][m]) for m in ("EuH1", "EuL2", "EpL2"))
    assert rep["solve"]["relative_residual"] <= 1e-10
    assert (out / "solution.txt").read_text().startswith("# k 1")


def test_solve_example4_small_mu(tmp_path):
    args = ["solve", "--problem", "example4", "--mu", "1e-4", "--k", "2", "--n", "6", "--out", str(tmp_path)]
    assert cli.main(args) == 0
    rep = json.loads((tmp_path / "errors.json").read_text())
    assert math.isfinite(rep["errors"]["EuH1"])


def test_solve_patch_k2_and_mesh_file(tmp_path):
    cli.main(["mesh", "--family", "nonconvex", "--n", "3", "--out", str(tmp_path)])
    args = ["solve", "--problem", "stokes_patch", "--k", "2", "--mesh", str(tmp_path / "nonconvex_n3.mesh"),
            "--out", str(tmp_path)]
    assert cli.main(args) == 0
    err = json.loads((tmp_path / "errors.json").read_text())["errors"]
    assert max(err["EuH1"], err["EuL2"], err["EpL2"]) <= 1e-8


def test_convergence_five_levels(tmp_path, capsys):
    args = ["convergence", "--problem", "example1", "--k", "1", "--levels", "2,3,4,5,6", "--out", str(tmp_path)]
    assert cli.main(args) == 0
    rows = (tmp_path / "table.csv").read_text().splitlines()
    assert len(rows) == 6 and rows[0] == "h,EuH1,rateH1,EuL2,rateL2,EpL2,rateP"
    assert (tmp_path / "table.md").exists() and (tmp_path / "plotdata.txt").exists()


def test_convergence_variants_agree(tmp_path):
    tables = {}
    for v in ("skew", "hat"):
        out = tmp_path / v
        cli.main(["convergence", "--problem", "example1", "--levels", "4,8", "--variant", v, "--out", str(out)])
        tables[v] = [float(r.split(",")[1]) for r in (out / "table.csv").read_text().splitlines()[1:]]
    for a, b in zip(tables["skew"], tables["hat"]):
        assert abs(a - b) <= 0.1 * max(a, b)


def test_convergence_partial_table_on_failure(tmp_path, monkeypatch):
    from oseenvem import system

    real = system.solve
    calls = {"n": 0}

    def flaky(sys_, *a, **kw):
        calls["n"] += 1
        if calls["n"] == 2:
            raise system.SolverFailure("injected")
        return real(sys_, *a, **kw)

    monkeypatch.setattr(system, "solve", flaky)
    assert cli.main(["convergence", "--levels", "2,4,8", "--out", str(tmp_path)]) == 3
    assert len((tmp_path / "table.csv").read_text().splitlines()) == 2


def test_solver_failure_exit_code(tmp_path, monkeypatch):
    from oseenvem import system

    def boom(*a, **kw):
        raise system.SolverFailure("injected")

    monkeypatch.setattr(system, "solve", boom)
    assert cli.main(["solve", "--n", "2", "--out", str(tmp_path)]) == 3


def test_verify_pass_and_verbose(capsys):
    assert cli.main(["verify", "--only", "quadrature-exactness", "--only", "skew-symmetry", "-v"]) == 0
    out = capsys.readouterr().out
    assert "PASS quadrature-exactness" in out and "s)" in out


def test_verify_fault_injection(capsys):
    assert cli.main(["verify", "--only", "quadrature-exactness", "--inject-fault", "quadrature"]) == 1
    assert "failing properties: quadrature-exactness" in capsys.readouterr().out


def test_dump_config_round_trip(tmp_path, capsys):
    args = ["convergence", "--problem", "example3", "--mu", "1e-8", "--r1", "1.1", "--c1", "0.5", "--levels", "5,10",
            "--variant", "hat", "--dump-config"]
    assert cli.main(args) == 0
    text = capsys.readouterr().out
    assert "stab.c1 = 0.5" in text
    cfg = cli.config_from_text(text)
    assert cfg.to_text() == text and cfg.variant == "hat" and cfg.r1 == 1.1
    (tmp_path / "c.cfg").write_text(text)
    # flags win over the file
    cli.main(["convergence", "--config", str(tmp_path / "c.cfg"), "--k", "2", "--dump-config"])
    cfg2 = cli.config_from_text(capsys.readouterr().out)
    assert cfg2.k == 2 and cfg2.stab_c1 == 0.5 and cfg2.mu == 1e-8


def test_unknown_config_key(tmp_path, capsys):
    with pytest.raises(ParseError):
        cli.parse_config_text("colour = red\n")
    (tmp_path / "bad.cfg").write_text("colour = red\n")
    assert cli.main(["solve", "--config", str(tmp_path / "bad.cfg")]) == 2


@given(mu=st.one_of(st.none(), st.floats(0, 1e3, allow_nan=False)),
       k=st.integers(1, 4), c1=st.floats(0, 10, allow_nan=False),
       levels=st.lists(st.integers(1, 200), min_size=2, max_size=6),
       variant=st.sampled_from(["skew", "hat"]))
def test_config_text_lossless(mu, k, c1, levels, variant):
    cfg = cli.RunConfig(mu=mu, k=k, stab_c1=c1, levels=levels, variant=variant)
    back = cli.config_from_text(cfg.to_text())
    assert back == cfg
