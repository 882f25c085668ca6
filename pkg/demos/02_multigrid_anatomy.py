"""Inside one multigrid V-cycle.

Builds a 64x64 Poisson hierarchy, shows the Galerkin coarse operators,
measures how much one V-cycle shrinks the residual, and checks that the
cycle used as a preconditioner is a symmetric operator (damped Jacobi with
equal pre- and post-smoothing).
"""

import numpy as np

from topopt_mg.fem import assemble_poisson
from topopt_mg.grid import build_hierarchy
from topopt_mg.solvers import SolverConfig, mg_cycle, mg_preconditioner, pcgmg_solve, setup_multigrid

# %% hierarchy and coarse operators
hier = build_hierarchy(64, 64, 5)
K, f = assemble_poisson(hier.finest)
ops = setup_multigrid(hier, K, omega=0.6)
for level, (grid, A) in enumerate(zip(hier.levels, ops.matrices)):
    print(f"level {level}: {grid.nx:>2}x{grid.ny:<2} elements, {A.shape[0]:>5} dofs, {A.nnz:>6} nonzeros")

# %% residual contraction of repeated V-cycles
u = np.zeros_like(f)
r0 = np.linalg.norm(f)
for cycle in range(1, 9):
    u = mg_cycle(ops, hier.num_coarsenings, u, f)
    print(f"cycle {cycle}: |r| / |r0| = {np.linalg.norm(f - K @ u) / r0:.2e}")

# %% the preconditioner is symmetric on a small grid
small = build_hierarchy(8, 8, 2)
Ks, _ = assemble_poisson(small.finest)
apply = mg_preconditioner(setup_multigrid(small, Ks))
M = np.column_stack([apply(e) for e in np.eye(Ks.shape[0])])
print(f"8x8 preconditioner: max |M - M^T| = {np.abs(M - M.T).max():.1e}")

# %% pCGMG on the big grid
rep = pcgmg_solve(ops, f, SolverConfig("pcgmg", tol=1e-10, num_coarsenings=5))
print(f"pCGMG to 1e-10: {rep.iterations} iterations, history {np.round(rep.history, 12).tolist()}")
