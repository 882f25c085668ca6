"""Linear solvers: Cholesky, stationary iterations, CG and pCGMG."""

import time

import numpy as np

from ..errors import ConfigurationError
from .base import METHODS, SolveReport, SolverConfig, relative_residual
from .direct import CholeskyFactor, cholesky_factor, cholesky_solve
from .krylov import cg_solve, pcg_solve
from .multigrid import (MultigridOperators, galerkin_operators, mg_cycle,
                        mg_preconditioner, pcgmg_solve, setup_multigrid)
from .stationary import smoother_sweep, stationary_solve

__all__ = [
    "METHODS",
    "SolverConfig",
    "SolveReport",
    "CholeskyFactor",
    "cholesky_factor",
    "cholesky_solve",
    "smoother_sweep",
    "stationary_solve",
    "cg_solve",
    "pcg_solve",
    "MultigridOperators",
    "galerkin_operators",
    "setup_multigrid",
    "mg_cycle",
    "mg_preconditioner",
    "pcgmg_solve",
    "solve",
]


def solve(K, b, cfg, hierarchy=None, x0=None):
    """Solve ``K x = b`` with ``cfg.method``; wall time includes any setup.

    ``hierarchy`` is required for ``pcgmg``. ``x0`` is a warm start for the
    iterative methods and ignored by Cholesky.
    """
    start = time.perf_counter()
    if cfg.method == "cholesky":
        x = cholesky_solve(cholesky_factor(K), b)
        rel = relative_residual(K, x, b)
        report = SolveReport(x, 0, float(rel), True, 0.0, [float(rel)])
    elif cfg.method in ("jacobi", "damped_jacobi", "gauss_seidel"):
        report = stationary_solve(K, b, cfg.method, cfg.omega, cfg.tol, cfg.max_iter, x0)
    elif cfg.method == "cg":
        report = cg_solve(K, b, cfg.tol, cfg.max_iter, x0)
    elif cfg.method == "pcgmg":
        if hierarchy is None:
            raise ConfigurationError("pcgmg needs a grid hierarchy")
        ops = setup_multigrid(hierarchy, K, cfg.omega)
        report = pcgmg_solve(ops, b, cfg, x0)
    else:
        raise ConfigurationError(f"unknown method {cfg.method!r}")
    report.wall_time = time.perf_counter() - start
    return report
