import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topopt_mg import cli
from topopt_mg.bench import BenchMatrix, BenchRow
from topopt_mg.config import ConfigParseError, RunConfig, parse_config, write_config
from topopt_mg.errors import NotPositiveDefiniteError
from topopt_mg.materials import DensityField
from topopt_mg.mto import OptimConfig, optimize, square_wall
from topopt_mg.report import bench_table_markdown, emit_outputs, write_pgm
from topopt_mg.solvers import SolverConfig


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# configuration


def test_empty_file_gives_wall_study_defaults(tmp_path):
    cfg = parse_config(write(tmp_path, "# nothing\n\n"), env={})
    assert cfg.moduli == (9.0, 3.0, 1.0, 1e-9)
    assert cfg.volume_fractions == (0.16, 0.08, 0.08, 0.68)
    assert cfg.filter_radius == 8 and cfg.tol == 1e-3
    assert cfg.cgtol == 1e-6 and cfg.cg_max == 1000
    assert cfg.penalty == 3.0
    assert cfg == RunConfig()


def test_volume_fraction_sum_error_has_line_and_key(tmp_path):
    path = write(tmp_path, "mesh = 16x16\nvolume_fractions = 0.5, 0.5, 0.1\n")
    with pytest.raises(ConfigParseError, match=r":2: volume_fractions: must sum to 1") as info:
        parse_config(path)
    assert info.value.line == 2 and info.value.key == "volume_fractions"


def test_unknown_key_is_an_error(tmp_path):
    with pytest.raises(ConfigParseError, match=r":3: unknown key 'mg_level'"):
        parse_config(write(tmp_path, "mesh = 8x8\n# comment\nmg_level = 2\n"))


def test_unparsable_value(tmp_path):
    with pytest.raises(ConfigParseError, match=r":1: cgtol: cannot parse"):
        parse_config(write(tmp_path, "cgtol = tiny\n"))


def test_invariant_violation_maps_to_key(tmp_path):
    with pytest.raises(ConfigParseError, match=r":2: omega"):
        parse_config(write(tmp_path, "method = pcgmg\nomega = 1.5\n"))
    with pytest.raises(ConfigParseError, match="pre_sweeps"):
        parse_config(None, {"pre_sweeps": "3"})


def test_flags_override_file(tmp_path):
    path = write(tmp_path, "mg_levels = 5\n")
    assert parse_config(path).mg_levels == 5
    assert parse_config(path, {"mg_levels": "3"}).mg_levels == 3


def test_duplicate_key_and_missing_equals(tmp_path):
    with pytest.raises(ConfigParseError, match="duplicate"):
        parse_config(write(tmp_path, "tol = 1e-3\ntol = 1e-4\n"))
    with pytest.raises(ConfigParseError, match=":1:"):
        parse_config(write(tmp_path, "tol 1e-3\n"))


def test_env_sets_default_output_dir(tmp_path):
    assert parse_config(None, env={"TOPOPT_OUT": "/x/y"}).out_dir == "/x/y"
    assert parse_config(None, {"out_dir": "z"}, env={"TOPOPT_OUT": "/x/y"}).out_dir == "z"


def test_list_values_parse():
    cfg = parse_config(None, {"mesh": "32x32, 64X64", "levels": "accurate, 2,3",
                              "method": "damped-jacobi", "warm_start": "yes"})
    assert cfg.mesh == ((32, 32), (64, 64))
    assert cfg.levels == ("accurate", 2, 3)
    assert cfg.method == "damped_jacobi" and cfg.warm_start is True


def test_run_config_builds_component_configs():
    cfg = parse_config(None, {"cgtol": "1e-8", "mg_levels": "3"})
    oc = cfg.optim_config()
    assert isinstance(oc, OptimConfig)
    assert oc.solver.tol == 1e-8 and oc.solver.num_coarsenings == 3
    assert cfg.material().phase_moduli == (9.0, 3.0, 1.0, 1e-9)


fractions = st.lists(st.integers(1, 50), min_size=2, max_size=5).map(
    lambda w: tuple(float(x) for x in np.asarray(w) / np.sum(w)))


@settings(max_examples=40, deadline=None)
@given(vf=fractions, cgtol=st.floats(1e-12, 1e-2), rf=st.floats(0, 20),
       levels=st.lists(st.integers(0, 6), min_size=1, max_size=4),
       method=st.sampled_from(["cholesky", "jacobi", "gauss_seidel", "cg", "pcgmg"]),
       images=st.booleans())
def test_round_trip(tmp_path_factory, vf, cgtol, rf, levels, method, images):
    if abs(sum(vf) - 1.0) > 1e-12:
        return
    moduli = tuple(float(10 - i) for i in range(len(vf)))
    cfg = RunConfig(volume_fractions=vf, moduli=moduli, cgtol=cgtol, filter_radius=rf,
                    levels=("accurate",) + tuple(levels), method=method, images=images,
                    out_dir="some dir/out").validate()
    path = str(tmp_path_factory.mktemp("rt") / "cfg.txt")
    write_config(cfg, path)
    assert parse_config(path, env={}) == cfg


# artifacts


def test_uniform_pgm_pixels(tmp_path):
    dens = DensityField.uniform((0.16, 0.84), 5, 3)
    path = tmp_path / "p.pgm"
    write_pgm(path, dens.as_image(0))
    data = path.read_bytes()
    header = b"P5\n5 3\n255\n"
    assert data.startswith(header)
    assert data[len(header):] == bytes([41]) * 15


def test_pgm_orientation(tmp_path):
    field = np.zeros((3, 2))
    field[2, 1] = 1.0  # right column, top row
    path = tmp_path / "o.pgm"
    write_pgm(path, field)
    pixels = path.read_bytes()[len(b"P5\n3 2\n255\n"):]
    assert list(pixels) == [0, 0, 255, 0, 0, 0]


def test_emit_outputs_for_optimization(tmp_path):
    rep = optimize(square_wall(8, 8), OptimConfig(filter_radius=2.0, max_outer=5,
                                                  solver=SolverConfig("cholesky")))
    paths = emit_outputs(rep, str(tmp_path))
    names = sorted(p.rsplit("/", 1)[-1] for p in paths)
    assert names == ["composite.ppm", "history.csv", "phase_0.pgm", "phase_1.pgm",
                     "phase_2.pgm", "phase_3.pgm"]
    with open(tmp_path / "history.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["iteration", "compliance", "max_change", "solver_iterations", "seconds"]
    assert len(rows) - 1 == rep.iterations
    ppm = (tmp_path / "composite.ppm").read_bytes()
    assert ppm.startswith(b"P6\n8 8\n255\n") and len(ppm) == len(b"P6\n8 8\n255\n") + 192


def test_composite_colors(tmp_path):
    alpha = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
    path = tmp_path / "c.ppm"
    from topopt_mg.report import write_ppm
    write_ppm(path, DensityField(alpha, 2, 1))
    pixels = path.read_bytes()[len(b"P6\n2 1\n255\n"):]
    assert list(pixels) == [255, 0, 0, 255, 255, 255]


def test_empty_bench_table_is_header_only(tmp_path):
    emit_outputs(BenchMatrix(), str(tmp_path))
    lines = (tmp_path / "table.md").read_text().splitlines()
    assert lines == ["| Method |", "|---|"]


def test_bench_table_layout():
    m = BenchMatrix([BenchRow("16x16", "pcgmg", 4, 0.01, True),
                     BenchRow("16x16", "cholesky", skipped=True),
                     BenchRow("32x32", "pcgmg", 5, 0.02, False)])
    text = bench_table_markdown(m)
    lines = text.splitlines()
    assert lines[0] == "| Method | 16x16 Iter. | 16x16 Time | 32x32 Iter. | 32x32 Time |"
    assert "no survey" in lines[3]
    assert "5 (not converged)" in lines[2]


# command line


def test_cli_solve(tmp_path, capsys):
    rc = cli.main(["solve", "--mesh", "16x16", "--method", "pcgmg", "--mg-levels", "3",
                   "--tol", "1e-8", "--out-dir", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "converged=True" in out and "method=pcgmg" in out
    assert (tmp_path / "residuals.csv").exists()
    cfg = parse_config(str(tmp_path / "config.txt"))
    assert cfg.cgtol == 1e-8 and cfg.tol == 1e-3 and cfg.command == "solve"


def test_cli_solve_elasticity(tmp_path, capsys):
    rc = cli.main(["solve", "--mesh", "8x8", "--problem", "wall", "--method", "gauss-seidel",
                   "--cg-max", "100000", "--out-dir", str(tmp_path)])
    assert rc == 0
    assert "method=gauss_seidel" in capsys.readouterr().out


def test_cli_poisson_bench(tmp_path, capsys):
    rc = cli.main(["poisson-bench", "--grids", "16", "--out-dir", str(tmp_path)])
    assert rc == 0
    assert "| pcgmg |" in capsys.readouterr().out
    assert (tmp_path / "table.md").exists() and (tmp_path / "bench.csv").exists()


def test_cli_wall_with_config(tmp_path, capsys):
    cfg = write(tmp_path, "mesh = 8x8\nlevels = accurate, 1\nfilter_radius = 2\n"
                          "max_outer = 4\n")
    rc = cli.main(["wall", "--config", cfg, "--out-dir", str(tmp_path / "out")])
    assert rc == 0
    assert (tmp_path / "out" / "8x8_l1" / "history.csv").exists()
    assert (tmp_path / "out" / "table.md").read_text().startswith("| Method | 8x8 Iter.")


def test_cli_exit_code_config(tmp_path, capsys):
    assert cli.main(["wall", "--volume-fractions", "0.5,0.5,0.1"]) == 1
    assert "must sum to 1" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        cli.main(["wall", "--no-such-flag", "1"])
    assert info.value.code == 1


def test_cli_exit_code_numerical(tmp_path, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise NotPositiveDefiniteError("pivot at row 3", row=2)

    monkeypatch.setattr(cli, "solve", broken)
    rc = cli.main(["solve", "--mesh", "8x8", "--method", "cholesky", "--out-dir", str(tmp_path)])
    assert rc == 2
    assert "row 3" in capsys.readouterr().err


def test_cli_exit_code_io(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    rc = cli.main(["solve", "--mesh", "8x8", "--out-dir", str(blocker / "sub")])
    assert rc == 3
    assert "I/O error" in capsys.readouterr().err
    assert cli.main(["wall", "--config", str(tmp_path / "missing.cfg")]) == 3


def test_cli_uses_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("TOPOPT_OUT", str(tmp_path / "envout"))
    assert cli.main(["solve", "--mesh", "8x8", "--method", "cg"]) == 0
    assert (tmp_path / "envout" / "config.txt").exists()
