"""Jacobi, damped Jacobi and Gauss-Seidel splittings ``A = M - N``."""

import time

import numpy as np

from ..errors import ConfigurationError, SplittingError
from . import _kernels
from .base import SolveReport, as_csr, check_rhs

KINDS = ("jacobi", "damped_jacobi", "gauss_seidel")


def _diagonal(A):
    A.sort_indices()
    diag = _kernels.csr_diagonal(A.indptr, A.indices, A.data, A.shape[0])
    if np.any(diag <= 0):
        i = int(np.flatnonzero(diag <= 0)[0])
        raise SplittingError(f"diagonal entry {i} is {diag[i]:.3e}; splitting needs D > 0")
    return diag


def _kind(kind, omega):
    kind = kind.replace("-", "_")
    if kind not in KINDS:
        raise ConfigurationError(f"unknown smoother {kind!r}; choose from {KINDS}")
    if kind == "damped_jacobi" and not 0 < omega <= 1:
        raise ConfigurationError(f"omega must lie in (0, 1], got {omega}")
    return kind, (omega if kind == "damped_jacobi" else 1.0)


def smoother_sweep(A, x, b, kind="jacobi", omega=1.0):
    """Apply one sweep of the named iteration to ``x`` in place and return it.

    Jacobi uses ``M = D``, damped Jacobi ``M = D / omega`` and Gauss-Seidel
    ``M = D - L`` with rows relaxed in ascending order.
    """
    A = as_csr(A)
    b = check_rhs(A, b)
    kind, omega = _kind(kind, omega)
    diag = _diagonal(A)
    if kind == "gauss_seidel":
        pos = _kernels.diagonal_positions(A.indptr, A.indices, A.shape[0])
        _kernels.gauss_seidel_sweep(A.indptr, A.indices, A.data, pos, b, x)
    else:
        x_new = np.empty_like(x)
        _kernels.jacobi_step(A.indptr, A.indices, A.data, 1.0 / diag, b, x, x_new, omega)
        x[:] = x_new
    return x


def stationary_solve(A, b, kind="jacobi", omega=1.0, tol=1e-6, max_iter=10000, x0=None):
    """Iterate ``x_{k+1} = M^{-1} N x_k + M^{-1} b`` from ``x0 = 0``.

    For symmetric ``A`` the Gauss-Seidel residual is accumulated during the
    sweep itself. Divergence or hitting ``max_iter`` gives
    ``converged=False``, not an exception.
    """
    A = as_csr(A)
    b = check_rhs(A, b)
    kind, omega = _kind(kind, omega)
    start = time.perf_counter()
    diag = _diagonal(A)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    nb = np.linalg.norm(b)
    if nb == 0:
        return SolveReport(np.zeros_like(b), 0, 0.0, True, time.perf_counter() - start, [0.0])

    indptr, indices, data = A.indptr, A.indices, A.data
    it = 0
    if kind == "gauss_seidel":
        r = b - A @ x
        rel = np.linalg.norm(r) / nb
        history = [rel]
        symmetric = abs(A - A.T).max() <= 1e-14 * abs(A).max()
        pos = _kernels.diagonal_positions(indptr, indices, A.shape[0])
        while rel > tol and it < max_iter and np.isfinite(rel):
            if symmetric:
                rr = _kernels.gauss_seidel_sweep_residual(indptr, indices, data, pos, b, x, r)
                rel = np.sqrt(rr) / nb
            else:
                _kernels.gauss_seidel_sweep(indptr, indices, data, pos, b, x)
                rel = np.linalg.norm(b - A @ x) / nb
            it += 1
            history.append(rel)
    else:
        # each kernel call measures the residual of the iterate it starts from
        history = []
        inv_diag = 1.0 / diag
        x_new = np.empty_like(x)
        while True:
            rr = _kernels.jacobi_step(indptr, indices, data, inv_diag, b, x, x_new, omega)
            rel = np.sqrt(rr) / nb
            history.append(rel)
            if rel <= tol or it >= max_iter or not np.isfinite(rel):
                break
            x, x_new = x_new, x
            it += 1
    converged = bool(rel <= tol)
    return SolveReport(x, it, float(rel), converged, time.perf_counter() - start, history)
