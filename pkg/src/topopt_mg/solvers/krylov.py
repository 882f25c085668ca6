"""Conjugate gradients, plain and preconditioned."""

import time

import numpy as np

from ..errors import NotPositiveDefiniteError, PreconditionerError
from .base import SolveReport, as_csr, check_rhs


def _start(A, b, x0):
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x if x0 is not None else b.copy()
    return x, r


def cg_solve(A, b, tol=1e-6, max_iter=1000, x0=None, callback=None):
    """Hestenes-Stiefel conjugate gradients for SPD ``A``.

    ``callback(x)`` runs after every iteration with the current iterate
    (a live view; copy it to keep it).
    """
    A = as_csr(A)
    b = check_rhs(A, b)
    start = time.perf_counter()
    nb = np.linalg.norm(b)
    if nb == 0:
        return SolveReport(np.zeros_like(b), 0, 0.0, True, time.perf_counter() - start, [0.0])
    x, r = _start(A, b, x0)
    rr = r @ r
    rel = np.sqrt(rr) / nb
    history = [rel]
    p = r.copy()
    it = 0
    while rel > tol and it < max_iter:
        Ap = A @ p
        pAp = p @ Ap
        if not pAp > 0:
            raise NotPositiveDefiniteError(f"CG breakdown: p^T A p = {pAp:.3e} at iteration {it}")
        alpha = rr / pAp
        x += alpha * p
        r -= alpha * Ap
        rr_new = r @ r
        it += 1
        if callback is not None:
            callback(x)
        rel = np.sqrt(rr_new) / nb
        if rel <= tol:
            # guard against drift of the recursive residual
            r = b - A @ x
            rr_new = r @ r
            rel = np.sqrt(rr_new) / nb
        history.append(rel)
        p = r + (rr_new / rr) * p
        rr = rr_new
    return SolveReport(x, it, float(rel), bool(rel <= tol), time.perf_counter() - start, history)


def pcg_solve(A, b, precond=None, tol=1e-6, max_iter=1000, x0=None, callback=None):
    """Preconditioned conjugate gradients.

    Parameters
    ----------
    A : sparse matrix or ndarray
        Symmetric positive definite system matrix.
    b : ndarray
        Right-hand side.
    precond : callable, optional
        Applies ``z = M^{-1} r``; must act as a symmetric positive definite
        operator. ``None`` means ``M = I``.
    tol : float
        Relative residual tolerance.
    max_iter : int
        Iteration cap.
    x0 : ndarray, optional
        Initial guess, zero by default.
    callback : callable, optional
        Called as ``callback(x)`` after every iteration.

    Returns
    -------
    SolveReport
        ``history[k]`` is the relative residual after ``k`` iterations.

    Raises
    ------
    PreconditionerError
        If ``z^T r <= 0`` for a nonzero residual.
    NotPositiveDefiniteError
        If ``p^T A p <= 0``.
    """
    A = as_csr(A)
    b = check_rhs(A, b)
    start = time.perf_counter()
    nb = np.linalg.norm(b)
    if nb == 0:
        return SolveReport(np.zeros_like(b), 0, 0.0, True, time.perf_counter() - start, [0.0])
    if precond is None:
        precond = np.copy
    x, r = _start(A, b, x0)
    rel = np.linalg.norm(r) / nb
    history = [rel]
    p = None
    zr_old = None
    it = 0
    while rel > tol and it < max_iter:
        z = precond(r)
        zr = z @ r
        if not zr > 0:
            raise PreconditionerError(f"z^T r = {zr:.3e} at iteration {it}; M is not SPD")
        if p is None:
            p = z.copy()
        else:
            p = z + (zr / zr_old) * p
        Ap = A @ p
        pAp = p @ Ap
        if not pAp > 0:
            raise NotPositiveDefiniteError(f"PCG breakdown: p^T A p = {pAp:.3e} at iteration {it}")
        alpha = zr / pAp
        x += alpha * p
        r -= alpha * Ap
        zr_old = zr
        it += 1
        if callback is not None:
            callback(x)
        rel = np.linalg.norm(r) / nb
        if rel <= tol:
            r = b - A @ x
            rel = np.linalg.norm(r) / nb
        history.append(rel)
    return SolveReport(x, it, float(rel), bool(rel <= tol), time.perf_counter() - start, history)
