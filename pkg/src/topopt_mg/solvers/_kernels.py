"""Compiled inner loops over CSR and lower-band storage."""

import numpy as np
from numba import njit


@njit(cache=True)
def band_cholesky(band, n):
    """Right-looking Cholesky in place on lower-band storage.

    ``band[j, d]`` holds ``A[j + d, j]``; the array is padded with ``bw``
    trailing zero rows so updates near the end need no bounds checks.
    Returns -1 on success or the index of the first non-positive pivot.
    """
    bw = band.shape[1] - 1
    for k in range(n):
        piv = band[k, 0]
        if not piv > 0.0:
            return k
        lkk = np.sqrt(piv)
        band[k, 0] = lkk
        for d in range(1, bw + 1):
            band[k, d] /= lkk
        for d2 in range(1, bw + 1):
            l2 = band[k, d2]
            if l2 == 0.0:
                continue
            col = k + d2
            for d1 in range(d2, bw + 1):
                band[col, d1 - d2] -= band[k, d1] * l2
    return -1


@njit(cache=True)
def band_solve(band, n, b):
    bw = band.shape[1] - 1
    y = b.copy()
    for k in range(n):
        y[k] /= band[k, 0]
        yk = y[k]
        for d in range(1, min(bw, n - 1 - k) + 1):
            y[k + d] -= band[k, d] * yk
    for k in range(n - 1, -1, -1):
        s = y[k]
        for d in range(1, min(bw, n - 1 - k) + 1):
            s -= band[k, d] * y[k + d]
        y[k] = s / band[k, 0]
    return y


@njit(cache=True)
def csr_diagonal(indptr, indices, data, n):
    diag = np.zeros(n)
    for i in range(n):
        for jj in range(indptr[i], indptr[i + 1]):
            if indices[jj] == i:
                diag[i] += data[jj]
    return diag


@njit(cache=True)
def diagonal_positions(indptr, indices, n):
    """Position of ``A[i, i]`` inside row ``i`` (column indices must be sorted)."""
    pos = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        for jj in range(indptr[i], indptr[i + 1]):
            if indices[jj] == i:
                pos[i] = jj
                break
    return pos


@njit(cache=True)
def jacobi_step(indptr, indices, data, inv_diag, b, x, x_new, omega):
    """``x_new = x + omega * D^-1 (b - A x)``; returns ``||b - A x||^2`` of the old ``x``."""
    n = b.shape[0]
    rr = 0.0
    for i in range(n):
        s = b[i]
        for jj in range(indptr[i], indptr[i + 1]):
            s -= data[jj] * x[indices[jj]]
        rr += s * s
        x_new[i] = x[i] + omega * s * inv_diag[i]
    return rr


@njit(cache=True)
def gauss_seidel_sweep(indptr, indices, data, diag_pos, b, x):
    """One forward sweep in ascending row order, in place."""
    n = b.shape[0]
    for i in range(n):
        s = b[i]
        d = diag_pos[i]
        for jj in range(indptr[i], d):
            s -= data[jj] * x[indices[jj]]
        for jj in range(d + 1, indptr[i + 1]):
            s -= data[jj] * x[indices[jj]]
        x[i] = s / data[d]


@njit(cache=True)
def gauss_seidel_sweep_residual(indptr, indices, data, diag_pos, b, x, r):
    """Forward sweep that also returns ``||b - A x_new||^2`` for symmetric ``A``.

    After row i is relaxed its residual is ``sum_{j>i} a_ij (x_old_j - x_new_j)``;
    by symmetry each later row j scatters ``a_ji * delta_j`` into ``r`` for
    its lower neighbours, so no second pass over the matrix is needed.
    """
    n = b.shape[0]
    for i in range(n):
        r[i] = 0.0
    for i in range(n):
        s = b[i]
        d = diag_pos[i]
        lo = indptr[i]
        for jj in range(lo, d):
            s -= data[jj] * x[indices[jj]]
        for jj in range(d + 1, indptr[i + 1]):
            s -= data[jj] * x[indices[jj]]
        xi = s / data[d]
        delta = x[i] - xi
        x[i] = xi
        for jj in range(lo, d):
            r[indices[jj]] += data[jj] * delta
    rr = 0.0
    for i in range(n):
        rr += r[i] * r[i]
    return rr
