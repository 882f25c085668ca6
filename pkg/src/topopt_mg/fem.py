"""Bilinear quad (Q4) finite elements on unit-square structured grids.

Global matrices are ``scipy.sparse.csr_matrix`` with both triangles stored.
Dirichlet dofs are eliminated by zeroing their row and column and putting a
one on the diagonal; the matching load entries are zeroed.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, DimensionError
from .grid import GridLevel, node_index
from .materials import effective_modulus

__all__ = [
    "BoundaryConditions",
    "element_stiffness",
    "poisson_element",
    "mass_element",
    "assemble",
    "assemble_elasticity",
    "assemble_poisson",
    "apply_dirichlet",
    "compliance",
    "is_symmetric",
    "wall_boundary_conditions",
]

_GAUSS = (-1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0))
# reference coordinates of the four local nodes, counter-clockwise from (0, 0)
_XI = np.array([-1.0, 1.0, 1.0, -1.0])
_ETA = np.array([-1.0, -1.0, 1.0, 1.0])


@dataclass
class BoundaryConditions:
    fixed_dofs: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    point_loads: list = field(default_factory=list)

    def __post_init__(self):
        self.fixed_dofs = np.unique(np.asarray(self.fixed_dofs, dtype=np.int64))
        self.point_loads = [(int(d), float(v)) for d, v in self.point_loads]

    def validate(self, n):
        if self.fixed_dofs.size and (self.fixed_dofs[0] < 0 or self.fixed_dofs[-1] >= n):
            raise ConfigurationError(f"fixed dof outside [0, {n})")
        fixed = set(self.fixed_dofs.tolist())
        for dof, _ in self.point_loads:
            if not 0 <= dof < n:
                raise ConfigurationError(f"loaded dof {dof} outside [0, {n})")
            if dof in fixed:
                raise ConfigurationError(f"dof {dof} is both loaded and fixed")

    def load_vector(self, n):
        f = np.zeros(n)
        for dof, value in self.point_loads:
            f[dof] += value
        return f


def _shape_gradients(xi, eta):
    # derivatives w.r.t. physical x, y on a unit square (dx/dxi = 1/2)
    dndx = 0.25 * _XI * (1.0 + eta * _ETA) * 2.0
    dndy = 0.25 * _ETA * (1.0 + xi * _XI) * 2.0
    return dndx, dndy


def _shape_values(xi, eta):
    return 0.25 * (1.0 + xi * _XI) * (1.0 + eta * _ETA)


def plane_stress_matrix(E, nu):
    return E / (1.0 - nu**2) * np.array([[1.0, nu, 0.0],
                                         [nu, 1.0, 0.0],
                                         [0.0, 0.0, 0.5 * (1.0 - nu)]])


def element_stiffness(E, nu):
    """Plane-stress Q4 stiffness of a unit square element (8x8).

    Integrated with 2x2 Gauss points; dofs are ordered
    ``(u0x, u0y, u1x, u1y, ...)`` over the counter-clockwise local nodes.
    """
    D = plane_stress_matrix(E, nu)
    ke = np.zeros((8, 8))
    det_j = 0.25
    for xi in _GAUSS:
        for eta in _GAUSS:
            dndx, dndy = _shape_gradients(xi, eta)
            B = np.zeros((3, 8))
            B[0, 0::2] = dndx
            B[1, 1::2] = dndy
            B[2, 0::2] = dndy
            B[2, 1::2] = dndx
            ke += B.T @ D @ B * det_j
    return ke


def poisson_element():
    """Q4 Laplacian element matrix ``int grad N_i . grad N_j`` (size independent in 2D)."""
    ke = np.zeros((4, 4))
    for xi in _GAUSS:
        for eta in _GAUSS:
            dndx, dndy = _shape_gradients(xi, eta)
            ke += (np.outer(dndx, dndx) + np.outer(dndy, dndy)) * 0.25
    return ke


def mass_element(h=1.0):
    me = np.zeros((4, 4))
    for xi in _GAUSS:
        for eta in _GAUSS:
            n = _shape_values(xi, eta)
            me += np.outer(n, n) * 0.25
    return me * h * h


def assemble(level, ke, scale=None):
    """Scatter ``scale[e] * ke`` over all elements of ``level`` into a CSR matrix."""
    edofs = level.element_dofs()
    ne, nd = edofs.shape
    if ke.shape != (nd, nd):
        raise DimensionError(f"element matrix {ke.shape} does not match {nd} element dofs")
    if scale is None:
        scale = np.ones(ne)
    scale = np.asarray(scale, dtype=float)
    if scale.shape != (ne,):
        raise DimensionError(f"{scale.size} element scales for {ne} elements")
    rows = np.repeat(edofs, nd, axis=1).ravel()
    cols = np.tile(edofs, (1, nd)).ravel()
    vals = (scale[:, None, None] * ke[None, :, :]).ravel()
    n = level.num_dofs
    K = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    K.sum_duplicates()
    K.sort_indices()
    return K


def apply_dirichlet(K, f, fixed_dofs):
    """Row/column elimination with a unit diagonal; returns new ``(K, f)``."""
    n = K.shape[0]
    fixed_dofs = np.asarray(fixed_dofs, dtype=np.int64)
    keep = np.ones(n)
    keep[fixed_dofs] = 0.0
    fix = 1.0 - keep
    Dk = sp.diags(keep)
    K = (Dk @ K @ Dk + sp.diags(fix)).tocsr()
    K.eliminate_zeros()
    K.sort_indices()
    f = np.array(f, dtype=float)
    f[fixed_dofs] = 0.0
    return K, f


def assemble_elasticity(level, density, mat, bc):
    """Global stiffness ``K(alpha)`` and load vector for plane-stress elasticity."""
    if level.dofs_per_node != 2:
        raise DimensionError("elasticity needs 2 dofs per node")
    if (density.nx, density.ny) != (level.nx, level.ny):
        raise DimensionError(
            f"density is {density.nx}x{density.ny}, grid is {level.nx}x{level.ny}")
    moduli = effective_modulus(density.alpha, mat)
    return assemble_elasticity_moduli(level, moduli, mat.poisson_ratio, bc)


def assemble_elasticity_moduli(level, moduli, nu, bc):
    n = level.num_dofs
    bc.validate(n)
    K = assemble(level, element_stiffness(1.0, nu), moduli)
    return apply_dirichlet(K, bc.load_vector(n), bc.fixed_dofs)


def assemble_poisson(level, source=1.0, h=1.0):
    """Q4 Galerkin system for ``-lap u = -f`` with ``u = 0`` on the boundary.

    ``source`` is a constant or one value per node (interpolated bilinearly);
    ``h`` is the element edge length, which only scales the load.
    """
    if level.dofs_per_node != 1:
        raise DimensionError("Poisson needs 1 dof per node")
    n = level.num_dofs
    if np.isscalar(source):
        nodal = np.full(n, float(source))
    else:
        nodal = np.asarray(source, dtype=float)
        if nodal.shape != (n,):
            raise DimensionError(f"source has shape {nodal.shape}, expected ({n},)")
    M = assemble(level, mass_element(h))
    f = -(M @ nodal)
    K = assemble(level, poisson_element())
    return apply_dirichlet(K, f, level.boundary_nodes())


def compliance(K, U):
    U = np.asarray(U, dtype=float)
    if U.shape != (K.shape[0],):
        raise DimensionError(f"U has shape {U.shape}, K is {K.shape}")
    return float(U @ (K @ U))


def is_symmetric(K, rtol=1e-12):
    """True if ``max |K - K^T| <= rtol * max |K|``; sparse or dense input."""
    diff = abs(K - K.T)
    if sp.issparse(diff) and diff.nnz == 0:
        return True
    return diff.max() <= rtol * abs(K).max()


def wall_boundary_conditions(level, load=1.0):
    """Square wall: bottom edge clamped, downward point load at the top-edge midpoint."""
    ny = level.ny
    bottom = node_index(np.arange(level.nx + 1), 0, ny)
    fixed = np.concatenate([2 * bottom, 2 * bottom + 1])
    top_mid = node_index(level.nx // 2, ny, ny)
    return BoundaryConditions(fixed, [(2 * top_mid + 1, -load)])
