"""Nested structured quad grids and the transfer operators between them.

Nodes are numbered column-major, ``node = ix * (ny + 1) + iy``, and vector
fields interleave their components, ``dof = dofs_per_node * node + c``.
Every module of the package relies on this ordering.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, DimensionError

__all__ = [
    "GridLevel",
    "GridHierarchy",
    "build_hierarchy",
    "prolongate",
    "restrict",
    "node_index",
    "node_coordinates",
]


@dataclass(frozen=True)
class GridLevel:
    nx: int
    ny: int
    dofs_per_node: int = 1
    level_index: int = 0

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ConfigurationError(f"grid needs nx, ny >= 1, got {self.nx}x{self.ny}")
        if self.dofs_per_node not in (1, 2):
            raise ConfigurationError(f"dofs_per_node must be 1 or 2, got {self.dofs_per_node}")

    @property
    def num_nodes(self):
        return (self.nx + 1) * (self.ny + 1)

    @property
    def num_dofs(self):
        return self.dofs_per_node * self.num_nodes

    @property
    def num_elements(self):
        return self.nx * self.ny

    def element_nodes(self):
        """Node indices of every element, shape ``(nx*ny, 4)``.

        Elements are numbered ``e = ex * ny + ey``. Local nodes run
        counter-clockwise from the lower-left corner.
        """
        ex, ey = np.meshgrid(np.arange(self.nx), np.arange(self.ny), indexing="ij")
        ex = ex.ravel()
        ey = ey.ravel()
        n00 = node_index(ex, ey, self.ny)
        n10 = node_index(ex + 1, ey, self.ny)
        n11 = node_index(ex + 1, ey + 1, self.ny)
        n01 = node_index(ex, ey + 1, self.ny)
        return np.stack([n00, n10, n11, n01], axis=1)

    def element_dofs(self):
        """Global dof indices of every element, shape ``(nx*ny, 4*dofs_per_node)``."""
        nodes = self.element_nodes()
        d = self.dofs_per_node
        if d == 1:
            return nodes
        out = np.empty((nodes.shape[0], 4 * d), dtype=np.int64)
        for c in range(d):
            out[:, c::d] = d * nodes + c
        return out

    def boundary_nodes(self):
        """Indices of nodes on the outer boundary, sorted."""
        ix, iy = np.meshgrid(np.arange(self.nx + 1), np.arange(self.ny + 1), indexing="ij")
        mask = (ix == 0) | (ix == self.nx) | (iy == 0) | (iy == self.ny)
        return np.flatnonzero(mask.ravel())


def node_index(ix, iy, ny):
    return ix * (ny + 1) + iy


def node_coordinates(level):
    """Integer node coordinates ``(ix, iy)`` as two flat arrays in node order."""
    ix, iy = np.meshgrid(np.arange(level.nx + 1), np.arange(level.ny + 1), indexing="ij")
    return ix.ravel(), iy.ravel()


def _prolongation_1d(n_coarse):
    # linear interpolation from n_coarse to 2*n_coarse intervals
    n_fine = 2 * n_coarse
    rows, cols, vals = [], [], []
    for i in range(n_fine + 1):
        if i % 2 == 0:
            rows.append(i)
            cols.append(i // 2)
            vals.append(1.0)
        else:
            rows += [i, i]
            cols += [i // 2, i // 2 + 1]
            vals += [0.5, 0.5]
    return sp.csr_matrix((vals, (rows, cols)), shape=(n_fine + 1, n_coarse + 1))


def _prolongation(coarse, dofs_per_node):
    p = sp.kron(_prolongation_1d(coarse.nx), _prolongation_1d(coarse.ny), format="csr")
    if dofs_per_node > 1:
        p = sp.kron(p, sp.identity(dofs_per_node), format="csr")
    return p


@dataclass(frozen=True)
class GridHierarchy:
    """Grids ordered coarsest (index 0) to finest, with ``prolongations[l-1] = P_l``."""

    levels: tuple
    prolongations: tuple = field(repr=False)

    @property
    def finest(self):
        return self.levels[-1]

    @property
    def num_coarsenings(self):
        return len(self.levels) - 1

    def P(self, level):
        if not 1 <= level <= self.num_coarsenings:
            raise ConfigurationError(f"no transfer operator into level {level}")
        return self.prolongations[level - 1]

    def R(self, level):
        """Full-weighting restriction ``P_l^T / 4``."""
        return (0.25 * self.P(level).T).tocsr()


def build_hierarchy(nx_fine, ny_fine, num_coarsenings, dofs_per_node=1):
    """Build ``num_coarsenings + 1`` nested grids ending at ``nx_fine x ny_fine``.

    Each coarser level halves both element counts, so both dimensions must be
    divisible by ``2**num_coarsenings``.
    """
    if num_coarsenings < 0:
        raise ConfigurationError(f"num_coarsenings must be >= 0, got {num_coarsenings}")
    factor = 2**num_coarsenings
    for name, n in (("nx", nx_fine), ("ny", ny_fine)):
        if n < 1:
            raise ConfigurationError(f"{name} must be >= 1, got {n}")
        if n % factor or n // factor < 1:
            raise ConfigurationError(
                f"{name}={n} is not divisible by 2**{num_coarsenings}={factor}"
            )
    levels = tuple(
        GridLevel(nx_fine // 2 ** (num_coarsenings - l), ny_fine // 2 ** (num_coarsenings - l),
                  dofs_per_node, l)
        for l in range(num_coarsenings + 1)
    )
    prolongations = tuple(_prolongation(levels[l - 1], dofs_per_node)
                          for l in range(1, num_coarsenings + 1))
    return GridHierarchy(levels, prolongations)


def prolongate(h, level, coarse_vec):
    coarse_vec = np.asarray(coarse_vec, dtype=float)
    expected = h.levels[level - 1].num_dofs
    if coarse_vec.shape != (expected,):
        raise DimensionError(f"coarse vector has shape {coarse_vec.shape}, expected ({expected},)")
    return h.P(level) @ coarse_vec


def restrict(h, level, fine_vec):
    fine_vec = np.asarray(fine_vec, dtype=float)
    expected = h.levels[level].num_dofs
    if fine_vec.shape != (expected,):
        raise DimensionError(f"fine vector has shape {fine_vec.shape}, expected ({expected},)")
    return 0.25 * (h.P(level).T @ fine_vec)
