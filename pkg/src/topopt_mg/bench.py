"""Scripted studies: Poisson solver comparison and the square-wall mesh/level sweep."""

import dataclasses
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import ConfigurationError, NumericalError
from .fem import assemble_poisson
from .grid import GridLevel, build_hierarchy
from .mto import OptimConfig, optimize, square_wall
from .solvers import SolverConfig, solve

__all__ = ["BenchRow", "BenchMatrix", "run_poisson_bench", "run_wall_sweep", "poisson_levels"]

POISSON_METHODS = ("pcgmg", "cholesky", "gauss_seidel", "jacobi")


@dataclass
class BenchRow:
    mesh: str
    label: str
    iterations: int = None
    seconds: float = 0.0
    converged: bool = False
    skipped: bool = False
    solver_iterations: int = None
    compliance: float = None
    error: str = None


@dataclass
class BenchMatrix:
    rows: list = field(default_factory=list)

    def cell(self, mesh, label):
        for row in self.rows:
            if row.mesh == mesh and row.label == label:
                return row
        raise KeyError((mesh, label))


def poisson_levels(n):
    """Coarsenings that leave a 2x2 coarsest grid for an ``n x n`` mesh."""
    if n < 4 or n & (n - 1):
        raise ConfigurationError(f"Poisson grids must be powers of two >= 4, got {n}")
    return int(math.log2(n)) - 1


def run_poisson_bench(grids=(16, 32, 64, 128, 256), methods=POISSON_METHODS, tol=1e-6,
                      max_iter=10**6, cholesky_cap=128, source=1.0, solver_kwargs=None):
    """One row per (grid, method); Cholesky above ``cholesky_cap`` is marked skipped."""
    solver_kwargs = solver_kwargs or {}
    matrix = BenchMatrix()
    for n in grids:
        levels = poisson_levels(n)
        mesh = f"{n}x{n}"
        for method in methods:
            method = method.replace("-", "_")
            if method == "cholesky" and n > cholesky_cap:
                matrix.rows.append(BenchRow(mesh, method, skipped=True))
                continue
            cfg = SolverConfig(method, tol=tol, max_iter=max_iter,
                               num_coarsenings=levels, **solver_kwargs)
            hier = build_hierarchy(n, n, levels) if method == "pcgmg" else GridLevel(n, n)
            level = hier.finest if method == "pcgmg" else hier
            K, f = assemble_poisson(level, source)
            try:
                rep = solve(K, f, cfg, hier if method == "pcgmg" else None)
            except NumericalError as exc:
                matrix.rows.append(BenchRow(mesh, method, error=str(exc)))
                continue
            matrix.rows.append(BenchRow(mesh, method, rep.iterations, round(rep.wall_time, 3),
                                        rep.converged))
    return matrix


def _level_label(level):
    return "accurate" if level == "accurate" else f"l={level}"


def _wall_cell(nx, ny, level, cfg, out_dir, images, csv_files):
    from .report import emit_outputs

    if level == "accurate":
        solver = dataclasses.replace(cfg.solver, method="cholesky")
    else:
        solver = dataclasses.replace(cfg.solver, method="pcgmg", num_coarsenings=int(level))
    run_cfg = dataclasses.replace(cfg, solver=solver)
    mesh = f"{nx}x{ny}"
    label = _level_label(level)
    try:
        report = optimize(square_wall(nx, ny), run_cfg)
    except NumericalError as exc:
        return BenchRow(mesh, label, error=str(exc))
    if out_dir is not None:
        emit_outputs(report, os.path.join(out_dir, f"{mesh}_{label.replace('=', '')}"),
                     images=images, csv_files=csv_files)
    return BenchRow(mesh, label, report.iterations, round(report.wall_time, 3),
                    report.converged, solver_iterations=report.total_solver_iterations,
                    compliance=report.compliance[-1])


def run_wall_sweep(meshes=((32, 32),), levels=("accurate", 2), cfg=None, out_dir=None,
                   images=True, csv_files=True, workers=1):
    """One full optimization per (mesh, level) cell.

    ``levels`` mixes ``"accurate"`` (direct Cholesky) and multigrid
    coarsening counts. ``workers > 1`` runs cells in parallel, which makes
    the recorded wall times unreliable.
    """
    cfg = cfg or OptimConfig()
    cells = []
    for nx, ny in meshes:
        for level in levels:
            if level != "accurate":
                build_hierarchy(nx, ny, int(level), 2)  # divisibility check up front
            cells.append((nx, ny, level))
    if workers > 1:
        warnings.warn("parallel cells share the machine; wall times are not comparable",
                      RuntimeWarning, stacklevel=2)
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_wall_cell, nx, ny, level, cfg, out_dir, images, csv_files)
                       for nx, ny, level in cells]
            rows = [f.result() for f in futures]
    else:
        rows = [_wall_cell(nx, ny, level, cfg, out_dir, images, csv_files)
                for nx, ny, level in cells]
    return BenchMatrix(rows)
