"""Multi-material SIMP compliance minimization with an alternating active-phase OC scheme.

Each outer iteration solves the equilibrium once, then walks through every
phase pair ``(a, b)``, ``a < b``, in lexicographic order. Within a pair only
``alpha_a`` is free and ``alpha_b`` absorbs the change, so the per-element
sum of phase fractions stays one.
"""

import itertools
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ConfigurationError, DimensionError, MultiplierError
from .fem import (assemble_elasticity, compliance, element_stiffness,
                  wall_boundary_conditions)
from .grid import GridLevel, build_hierarchy
from .materials import (WALL_VOLUME_FRACTIONS, DensityField, MaterialModel,
                        effective_modulus)
from .solvers import SolverConfig, solve

__all__ = [
    "DensityField",
    "MaterialModel",
    "OptimConfig",
    "OptimReport",
    "Problem",
    "effective_modulus",
    "element_energies",
    "sensitivities",
    "filter_sensitivities",
    "oc_update_pair",
    "optimize",
    "square_wall",
]

BISECTION_BRACKET = (1e-10, 1e10)
BISECTION_HALVINGS = 100
VOLUME_TOL = 1e-6
# relative floor keeping the OC ratio positive where phase b is preferred
RATIO_FLOOR = 1e-8


@dataclass
class Problem:
    level: GridLevel
    bc: object
    mat: MaterialModel = field(default_factory=MaterialModel)


def square_wall(nx, ny, mat=None, load=1.0):
    """Bottom edge clamped, unit downward point load at the top-edge midpoint."""
    level = GridLevel(nx, ny, dofs_per_node=2)
    return Problem(level, wall_boundary_conditions(level, load), mat or MaterialModel())


@dataclass
class OptimConfig:
    volume_fractions: tuple = WALL_VOLUME_FRACTIONS
    filter_radius: float = 8.0
    filter_tol: float = 0.05
    tol: float = 1e-3
    inner_sweeps: int = 1
    move: float = 0.2
    eta: float = 0.5
    density_floor: float = 1e-3
    max_outer: int = 2000
    warm_start: bool = False
    solver: SolverConfig = field(
        default_factory=lambda: SolverConfig("pcgmg", tol=1e-6, max_iter=1000))

    def __post_init__(self):
        v = np.asarray(self.volume_fractions, dtype=float)
        self.volume_fractions = tuple(float(x) for x in v)
        if abs(v.sum() - 1.0) > 1e-12:
            raise ConfigurationError(f"volume fractions must sum to 1, got {v.sum():.12g}")
        if np.any((v <= 0) | (v >= 1)):
            raise ConfigurationError(f"each volume fraction must lie in (0, 1), got {tuple(v)}")
        if self.filter_radius < 0:
            raise ConfigurationError(f"filter_radius must be >= 0, got {self.filter_radius}")
        if not self.tol > 0 or not self.filter_tol > 0:
            raise ConfigurationError("tolerances must be > 0")
        if self.inner_sweeps < 1 or self.max_outer < 1:
            raise ConfigurationError("inner_sweeps and max_outer must be >= 1")
        if not 0 < self.move <= 1 or not self.eta > 0:
            raise ConfigurationError("need 0 < move <= 1 and eta > 0")
        if not 0 < self.density_floor < v.min():
            raise ConfigurationError(
                f"density_floor must lie in (0, min volume fraction), got {self.density_floor}")


@dataclass
class OptimReport:
    density: DensityField
    compliance: list
    change: list
    solver_iterations: list
    seconds: list
    converged: bool
    wall_time: float

    @property
    def iterations(self):
        return len(self.compliance)

    @property
    def total_solver_iterations(self):
        return int(sum(self.solver_iterations))


def element_energies(U, level, nu):
    """``u_e^T k u_e`` per element with the unit-modulus element stiffness."""
    U = np.asarray(U, dtype=float)
    if U.shape != (level.num_dofs,):
        raise DimensionError(f"U has shape {U.shape}, grid has {level.num_dofs} dofs")
    ue = U[level.element_dofs()]
    return np.einsum("ei,ij,ej->e", ue, element_stiffness(1.0, nu), ue)


def sensitivities(U, density, mat, level):
    """Adjoint compliance gradient ``dC/dalpha[i, e]``, shape ``(phases, elements)``.

    Equals ``-p * alpha**(p-1) * E_i * u_e^T k u_e``, so every entry is <= 0.
    """
    if density.num_elements != level.num_elements:
        raise DimensionError("density and grid disagree on the element count")
    return _sensitivities_from_energies(
        element_energies(U, level, mat.poisson_ratio), density.alpha, mat)


def _sensitivities_from_energies(energies, alpha, mat, phases=None):
    moduli = np.asarray(mat.phase_moduli)
    if phases is not None:
        alpha = alpha[list(phases)]
        moduli = moduli[list(phases)]
    p = mat.p_exp
    return -p * alpha ** (p - 1) * moduli[:, None] * energies[None, :]


def _filter_kernel(radius):
    reach = int(np.ceil(radius)) - 1
    d = np.arange(-reach, reach + 1)
    dist = np.hypot(d[:, None], d[None, :])
    return np.maximum(0.0, radius - dist)


def filter_sensitivities(raw, density, radius, phases=None):
    """Smooth sensitivities phase by phase with a linear-decay weighted mean.

    ``s_e <- sum_j w_ej s_j / sum_j w_ej`` with
    ``w_ej = max(0, radius - |c_e - c_j|)`` over element centroids. A radius
    of at most one only weights the element itself, so the input is returned
    unchanged. ``density`` supplies the grid shape.

    ``raw`` has one row per entry of ``phases`` (all phases by default).

    Notes
    -----
    Weighting by the phase fraction and dividing by ``alpha_e`` blows up the
    sensitivities of phases sitting at the density floor, and the alternating
    pair updates then oscillate without converging; the unweighted mean does not.
    """
    raw = np.asarray(raw, dtype=float)
    if radius <= 1:
        return raw.copy()
    nrows = density.num_phases if phases is None else len(phases)
    shape = (density.nx, density.ny)
    if raw.shape != (nrows, density.num_elements):
        raise DimensionError(f"raw has shape {raw.shape}, expected {(nrows, density.num_elements)}")
    kernel = _filter_kernel(radius)
    weight_sum = ndimage.correlate(np.ones(shape), kernel, mode="constant", cval=0.0)
    out = np.empty_like(raw)
    for row in range(nrows):
        num = ndimage.correlate(raw[row].reshape(shape), kernel, mode="constant", cval=0.0)
        out[row] = (num / weight_sum).ravel()
    return out


def oc_update_pair(density, phase_a, phase_b, sens_a, sens_b, target, move=0.2, eta=0.5,
                   floor=1e-3):
    """Optimality-criteria update of the binary sub-problem between two phases.

    ``alpha_a <- clip(alpha_a * B**eta)`` with ``B = (-dC/dalpha_a + dC/dalpha_b) / lam``,
    box ``[max(floor, alpha_a - move), min(s - floor, alpha_a + move)]`` where
    ``s = alpha_a + alpha_b`` is held per element, and ``lam`` chosen by
    bisection so the mean of ``alpha_a`` equals ``target``. Returns a new field.

    Raises
    ------
    MultiplierError
        If the volume target cannot be met inside the move limits.
    """
    if phase_a == phase_b:
        raise ConfigurationError("active phases must differ")
    alpha = density.alpha.copy()
    xa = alpha[phase_a]
    total = xa + alpha[phase_b]
    sens_a = np.asarray(sens_a, dtype=float)
    sens_b = np.asarray(sens_b, dtype=float)

    scale = max(np.max(np.abs(sens_a)), np.max(np.abs(sens_b)))
    if scale > 0:
        ratio = np.maximum((sens_b - sens_a) / scale, RATIO_FLOOR)
    else:
        ratio = np.ones_like(xa)
    lower = np.maximum(floor, xa - move)
    upper = np.minimum(total - floor, xa + move)

    lo, hi = BISECTION_BRACKET
    xnew = xa
    for _ in range(BISECTION_HALVINGS):
        lam = np.sqrt(lo * hi)
        xnew = np.clip(xa * (ratio / lam) ** eta, lower, upper)
        vol = xnew.mean()
        if vol > target:
            lo = lam
        else:
            hi = lam
        if abs(vol - target) <= 1e-13 or hi / lo - 1.0 < 1e-15:
            break
    if abs(xnew.mean() - target) > VOLUME_TOL:
        raise MultiplierError(
            f"volume target {target:.6g} for phase {phase_a} unreachable "
            f"(got {xnew.mean():.6g} after bisection)")
    alpha[phase_a] = xnew
    alpha[phase_b] = total - xnew
    return DensityField(alpha, density.nx, density.ny)


def _hierarchy_for(level, solver_cfg):
    if solver_cfg.method != "pcgmg":
        return None
    return build_hierarchy(level.nx, level.ny, solver_cfg.num_coarsenings, level.dofs_per_node)


def optimize(problem, cfg=None, callback=None):
    """Minimize compliance under per-phase volume constraints.

    Stops when the largest phase-fraction change over one outer iteration is
    at most ``cfg.tol`` or after ``cfg.max_outer`` iterations. ``callback``
    is called as ``callback(iteration, compliance, change, solve_report)``.
    """
    cfg = cfg or OptimConfig()
    mat = problem.mat
    level = problem.level
    if len(cfg.volume_fractions) != mat.num_phases:
        raise ConfigurationError(
            f"{len(cfg.volume_fractions)} volume fractions for {mat.num_phases} phases")
    hier = _hierarchy_for(level, cfg.solver)
    density = DensityField.uniform(cfg.volume_fractions, level.nx, level.ny)
    pairs = list(itertools.combinations(range(mat.num_phases), 2))

    start = time.perf_counter()
    comp, changes, solver_its, seconds = [], [], [], []
    converged = False
    U = None
    for it in range(cfg.max_outer):
        t0 = time.perf_counter()
        K, F = assemble_elasticity(level, density, mat, problem.bc)
        report = solve(K, F, cfg.solver, hier, U if cfg.warm_start else None)
        U = report.solution
        c = compliance(K, U)
        energies = element_energies(U, level, mat.poisson_ratio)

        previous = density.alpha.copy()
        for a, b in pairs:
            for _ in range(cfg.inner_sweeps):
                raw = _sensitivities_from_energies(energies, density.alpha, mat, (a, b))
                filt = filter_sensitivities(raw, density, cfg.filter_radius, (a, b))
                before = density.alpha[a].copy()
                density = oc_update_pair(density, a, b, filt[0], filt[1],
                                         cfg.volume_fractions[a], cfg.move, cfg.eta,
                                         cfg.density_floor)
                if np.max(np.abs(density.alpha[a] - before)) <= cfg.filter_tol:
                    break
        change = float(np.max(np.abs(density.alpha - previous)))

        comp.append(c)
        changes.append(change)
        solver_its.append(report.iterations)
        seconds.append(time.perf_counter() - t0)
        if callback is not None:
            callback(it, c, change, report)
        if change <= cfg.tol:
            converged = True
            break
    return OptimReport(density, comp, changes, solver_its, seconds, converged,
                       time.perf_counter() - start)
