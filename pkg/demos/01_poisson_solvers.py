"""Poisson on the unit square: how the linear solvers scale with the grid.

Each grid is solved to a relative residual of 1e-6 with the banded
Cholesky factorization, Jacobi, Gauss-Seidel and multigrid-preconditioned
CG (pCGMG) whose coarsest grid is always 2x2. Stationary iteration counts
grow roughly fourfold per refinement; pCGMG stays at a handful.

    python3 demos/01_poisson_solvers.py [largest grid, default 128]
"""

import sys

from topopt_mg.bench import run_poisson_bench
from topopt_mg.report import bench_table_markdown

# %% run the comparison
largest = int(sys.argv[1]) if len(sys.argv) > 1 else 128
grids = [n for n in (16, 32, 64, 128, 256) if n <= largest]
matrix = run_poisson_bench(grids, tol=1e-6)

# %% same layout as the command-line table.md
print(bench_table_markdown(matrix))

# %% iterations per refinement
for method in ("jacobi", "gauss_seidel", "pcgmg"):
    its = [matrix.cell(f"{n}x{n}", method).iterations for n in grids]
    growth = [round(b / a, 2) for a, b in zip(its, its[1:])]
    print(f"{method:>13}: {its}  growth per refinement {growth}")
