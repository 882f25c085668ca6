"""Solver configuration, reports and small helpers shared by the solvers."""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigurationError, DimensionError

METHODS = ("cholesky", "jacobi", "damped_jacobi", "gauss_seidel", "cg", "pcgmg")


@dataclass
class SolverConfig:
    """Linear-solver settings.

    ``tol`` is a relative residual tolerance ``||b - A x|| / ||b||``. The
    multigrid fields only matter for ``method="pcgmg"``.
    """

    method: str = "pcgmg"
    tol: float = 1e-6
    max_iter: int = 1000
    omega: float = 0.6
    gamma: int = 1
    pre_sweeps: int = 2
    post_sweeps: int = 2
    num_coarsenings: int = 2

    def __post_init__(self):
        self.method = self.method.replace("-", "_")
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method {self.method!r}; choose from {METHODS}")
        if not self.tol > 0:
            raise ConfigurationError(f"tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be >= 1, got {self.max_iter}")
        if not 0 < self.omega <= 1:
            raise ConfigurationError(f"omega must lie in (0, 1], got {self.omega}")
        if self.gamma not in (1, 2):
            raise ConfigurationError(f"gamma must be 1 (V) or 2 (W), got {self.gamma}")
        if self.pre_sweeps < 0 or self.post_sweeps < 0:
            raise ConfigurationError("sweep counts must be >= 0")
        if self.method == "pcgmg" and self.pre_sweeps != self.post_sweeps:
            raise ConfigurationError(
                "pcgmg needs pre_sweeps == post_sweeps for a symmetric preconditioner")
        if self.num_coarsenings < 0:
            raise ConfigurationError(f"num_coarsenings must be >= 0, got {self.num_coarsenings}")


@dataclass
class SolveReport:
    solution: np.ndarray
    iterations: int
    residual: float
    converged: bool
    wall_time: float = 0.0
    history: list = field(default_factory=list)


def as_csr(A):
    if sp.issparse(A):
        A = A.tocsr()
    else:
        A = sp.csr_matrix(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"matrix must be square, got {A.shape}")
    return A


def check_rhs(A, b):
    b = np.asarray(b, dtype=float)
    if b.shape != (A.shape[0],):
        raise DimensionError(f"right-hand side has shape {b.shape}, matrix is {A.shape}")
    return b


def relative_residual(A, x, b):
    nb = np.linalg.norm(b)
    r = np.linalg.norm(b - A @ x)
    return r / nb if nb > 0 else r
