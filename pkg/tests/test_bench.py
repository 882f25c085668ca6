import pytest

from topopt_mg.bench import BenchMatrix, poisson_levels, run_poisson_bench, run_wall_sweep
from topopt_mg.errors import ConfigurationError
from topopt_mg.mto import OptimConfig
from topopt_mg.solvers import SolverConfig

SMALL = OptimConfig(filter_radius=2.0, max_outer=60, solver=SolverConfig("pcgmg"))


def test_poisson_levels_leave_two_by_two():
    assert [poisson_levels(n) for n in (16, 32, 64, 128, 256)] == [3, 4, 5, 6, 7]
    with pytest.raises(ConfigurationError):
        poisson_levels(24)


def test_poisson_bench_matrix_shape_and_ordering():
    m = run_poisson_bench((16, 32), cholesky_cap=16)
    assert [(r.mesh, r.label) for r in m.rows] == [
        (f"{n}x{n}", k) for n in (16, 32) for k in ("pcgmg", "cholesky", "gauss_seidel", "jacobi")]
    assert m.cell("32x32", "cholesky").skipped
    assert not m.cell("16x16", "cholesky").skipped
    for row in m.rows:
        if not row.skipped:
            assert row.converged
    assert m.cell("32x32", "jacobi").iterations > m.cell("32x32", "gauss_seidel").iterations
    with pytest.raises(KeyError):
        m.cell("64x64", "pcgmg")


def test_poisson_bench_iteration_counts_deterministic():
    a = run_poisson_bench((16,), methods=("pcgmg", "gauss_seidel"))
    b = run_poisson_bench((16,), methods=("pcgmg", "gauss_seidel"))
    assert [r.iterations for r in a.rows] == [r.iterations for r in b.rows]


def test_wall_sweep_rows_and_outputs(tmp_path):
    m = run_wall_sweep([(8, 8)], ["accurate", 1], SMALL, out_dir=str(tmp_path))
    assert [r.label for r in m.rows] == ["accurate", "l=1"]
    for row in m.rows:
        assert row.error is None
        assert row.iterations >= 1 and row.compliance > 0
    assert m.rows[0].solver_iterations == 0
    assert m.rows[1].solver_iterations > 0
    assert (tmp_path / "8x8_accurate" / "history.csv").exists()
    assert (tmp_path / "8x8_l1" / "phase_3.pgm").exists()


def test_wall_sweep_checks_divisibility_first():
    with pytest.raises(ConfigurationError, match="nx=12"):
        run_wall_sweep([(12, 16)], ["accurate", 3], SMALL)


def test_wall_sweep_deterministic_iterations():
    a = run_wall_sweep([(8, 8)], [1], SMALL)
    b = run_wall_sweep([(8, 8)], [1], SMALL)
    assert a.rows[0].iterations == b.rows[0].iterations
    assert a.rows[0].compliance == b.rows[0].compliance


def test_parallel_cells_warn():
    with pytest.warns(RuntimeWarning, match="wall times"):
        m = run_wall_sweep([(8, 8)], ["accurate", 1], OptimConfig(filter_radius=2.0,
                                                                   max_outer=3), workers=2)
    assert len(m.rows) == 2


def test_empty_matrix():
    assert BenchMatrix().rows == []
