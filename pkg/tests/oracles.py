"""Independent reference computations shared by the unit and acceptance tests."""

import numpy as np
import scipy.linalg as sla

from topopt_mg.fem import assemble_elasticity, element_stiffness
from topopt_mg.materials import DensityField


def solve_dense(K, f):
    return sla.solve(K.toarray(), f, assume_a="pos")


def compliance_of(problem, alpha):
    dens = DensityField(alpha, problem.level.nx, problem.level.ny)
    K, f = assemble_elasticity(problem.level, dens, problem.mat, problem.bc)
    u = solve_dense(K, f)
    return f @ u, u


def central_difference(problem, alpha, phase, element, h=1e-5):
    """Plain ``(C(a + h) - C(a - h)) / 2h``, re-solving equilibrium both times."""
    plus, minus = alpha.copy(), alpha.copy()
    plus[phase, element] += h
    minus[phase, element] -= h
    return (compliance_of(problem, plus)[0] - compliance_of(problem, minus)[0]) / (2 * h)


def central_difference_secant(problem, alpha, phase, element, h=1e-5):
    """The same central difference evaluated without cancellation.

    With ``K+ U+ = F = K- U-`` one has ``C+ - C- = -U+^T (K+ - K-) U-``
    exactly, and ``K+ - K-`` lives on one element. This keeps the digits
    that the plain difference loses when the phase modulus is tiny.
    """
    plus, minus = alpha.copy(), alpha.copy()
    plus[phase, element] += h
    minus[phase, element] -= h
    _, u_plus = compliance_of(problem, plus)
    _, u_minus = compliance_of(problem, minus)
    mat = problem.mat
    p = mat.p_exp
    a = alpha[phase, element]
    d_mod = mat.phase_moduli[phase] * ((a + h) ** p - (a - h) ** p)
    dofs = problem.level.element_dofs()[element]
    ke = element_stiffness(1.0, mat.poisson_ratio)
    return -d_mod * (u_plus[dofs] @ ke @ u_minus[dofs]) / (2 * h)


def random_density(rng, num_phases, nx, ny, floor=0.05):
    """Random interior phase fractions with a per-element partition of unity."""
    alpha = rng.dirichlet(np.ones(num_phases), size=nx * ny).T
    alpha = floor + (1 - num_phases * floor) * alpha
    return alpha
