"""Cholesky factorization ``A = L L^T`` with forward/back substitution.

The factor is kept in lower-band storage: structured-grid matrices in
lexicographic node order have bandwidth about ``dofs_per_node * (ny + 2)``,
so factoring costs ``O(n * bw^2)`` instead of ``O(n^3)``. Dense inputs
simply have ``bw = n - 1``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionError, NotPositiveDefiniteError
from . import _kernels
from .base import as_csr, check_rhs


@dataclass
class CholeskyFactor:
    band: np.ndarray  # band[j, d] = L[j + d, j], padded with bw zero rows
    n: int

    @property
    def bandwidth(self):
        return self.band.shape[1] - 1

    def toarray(self):
        L = np.zeros((self.n, self.n))
        for d in range(self.bandwidth + 1):
            j = np.arange(self.n - d)
            L[j + d, j] = self.band[j, d]
        return L


def lower_bandwidth(A):
    A = A.tocoo()
    lower = A.row >= A.col
    if not np.any(lower):
        return 0
    return int(np.max(A.row[lower] - A.col[lower]))


def cholesky_factor(A):
    """Factor a symmetric positive definite matrix.

    Only the lower triangle of ``A`` is read.

    Raises
    ------
    NotPositiveDefiniteError
        If a pivot ``A_kk - sum_j L_kj^2`` is not strictly positive; ``row``
        is the zero-based index of that pivot.
    """
    A = as_csr(A)
    n = A.shape[0]
    bw = lower_bandwidth(A)
    coo = sp.tril(A).tocoo()
    band = np.zeros((n + bw, bw + 1))
    np.add.at(band, (coo.col, coo.row - coo.col), coo.data)
    failed = _kernels.band_cholesky(band, n)
    if failed >= 0:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite: pivot at row {failed + 1} "
            f"(index {failed}) is {band[failed, 0]:.3e}", row=int(failed))
    return CholeskyFactor(band, n)


def cholesky_solve(L, b):
    """Solve ``L L^T x = b`` by forward then back substitution."""
    b = np.asarray(b, dtype=float)
    if b.shape != (L.n,):
        raise DimensionError(f"right-hand side has shape {b.shape}, factor is {L.n}x{L.n}")
    return _kernels.band_solve(L.band, L.n, b)


def cholesky_direct(A, b):
    A = as_csr(A)
    b = check_rhs(A, b)
    return cholesky_solve(cholesky_factor(A), b)
