"""Adjoint sensitivities against finite differences.

The compliance gradient comes for free from the displacement field. The
check below perturbs single phase fractions and re-solves. For the void
phase (E = 1e-9) the plain difference C(a + h) - C(a - h) drowns in
round-off, so it is also evaluated in the algebraically identical form
-U+^T (K+ - K-) U- / 2h, which keeps every digit.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))
from oracles import central_difference, central_difference_secant, compliance_of, random_density  # noqa: E402

from topopt_mg.materials import DensityField  # noqa: E402
from topopt_mg.mto import sensitivities, square_wall  # noqa: E402

prob = square_wall(8, 8)
rng = np.random.default_rng(0)
alpha = random_density(rng, 4, 8, 8)
_, u = compliance_of(prob, alpha)
adjoint = sensitivities(u, DensityField(alpha, 8, 8), prob.mat, prob.level)

# %% one element per phase
e = 27
print(f"{'phase':>5} {'adjoint':>13} {'plain FD':>13} {'secant FD':>13}")
for phase in range(4):
    plain = central_difference(prob, alpha, phase, e)
    secant = central_difference_secant(prob, alpha, phase, e)
    print(f"{phase:>5} {adjoint[phase, e]:13.6e} {plain:13.6e} {secant:13.6e}")
