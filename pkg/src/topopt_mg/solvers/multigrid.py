"""Geometric multigrid cycles and multigrid-preconditioned CG (pCGMG)."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DimensionError
from .base import SolverConfig, as_csr, check_rhs
from .direct import cholesky_factor, cholesky_solve
from .krylov import pcg_solve


@dataclass
class MultigridOperators:
    """Per-level matrices (coarsest first) plus what the cycle reuses.

    The coarse factor and smoother diagonals are computed once and shared by
    every cycle applied with these operators.
    """

    hierarchy: object
    matrices: list
    inv_diagonals: list
    coarse_factor: object
    omega: float = 0.6

    @property
    def finest_level(self):
        return len(self.matrices) - 1


def galerkin_operators(hier, K):
    """Coarse matrices ``K_{l-1} = R_l K_l P_l`` down to level 0."""
    K = as_csr(K)
    if K.shape[0] != hier.finest.num_dofs:
        raise DimensionError(f"matrix is {K.shape}, finest grid has {hier.finest.num_dofs} dofs")
    mats = [K]
    for level in range(hier.num_coarsenings, 0, -1):
        P = hier.P(level)
        Kc = (0.25 * (P.T @ mats[0] @ P)).tocsr()
        # symmetrize away round-off from the triple product
        Kc = (0.5 * (Kc + Kc.T)).tocsr()
        Kc.sort_indices()
        mats.insert(0, Kc)
    return mats


def setup_multigrid(hier, K, omega=0.6):
    mats = galerkin_operators(hier, K)
    inv_diagonals = [1.0 / A.diagonal() for A in mats]
    return MultigridOperators(hier, mats, inv_diagonals, cholesky_factor(mats[0]), omega)


def _smooth(A, dinv, u, f, omega, sweeps):
    for _ in range(sweeps):
        u += omega * dinv * (f - A @ u)
    return u


def mg_cycle(ops, level, u, f, gamma=1, pre_sweeps=2, post_sweeps=2):
    """One multigrid gamma-cycle on ``K_level u = f``; returns the new ``u``.

    Level 0 is solved exactly with the stored Cholesky factor. On the finest
    level only a single coarse visit is made whatever ``gamma`` is.
    """
    if level == 0:
        return cholesky_solve(ops.coarse_factor, f)
    A = ops.matrices[level]
    dinv = ops.inv_diagonals[level]
    u = np.array(u, dtype=float)
    u = _smooth(A, dinv, u, f, ops.omega, pre_sweeps)
    fc = 0.25 * (ops.hierarchy.P(level).T @ (f - A @ u))
    uc = np.zeros_like(fc)
    visits = 1 if level == ops.finest_level else gamma
    for _ in range(visits):
        uc = mg_cycle(ops, level - 1, uc, fc, gamma, pre_sweeps, post_sweeps)
    u += ops.hierarchy.P(level) @ uc
    return _smooth(A, dinv, u, f, ops.omega, post_sweeps)


def mg_preconditioner(ops, gamma=1, pre_sweeps=2, post_sweeps=2):
    """``r -> M^{-1} r``: one cycle from a zero initial guess."""
    top = ops.finest_level

    def apply(r):
        return mg_cycle(ops, top, np.zeros_like(r), r, gamma, pre_sweeps, post_sweeps)

    return apply


def pcgmg_solve(ops, b, cfg=None, x0=None):
    """CG on the finest operator, preconditioned by one multigrid cycle per iteration."""
    cfg = cfg or SolverConfig()
    if cfg.pre_sweeps != cfg.post_sweeps:
        raise ConfigurationError("pcgmg needs equal pre- and post-smoothing sweeps")
    A = ops.matrices[-1]
    b = check_rhs(A, b)
    precond = mg_preconditioner(ops, cfg.gamma, cfg.pre_sweeps, cfg.post_sweeps)
    return pcg_solve(A, b, precond, cfg.tol, cfg.max_iter, x0)
