"""Phase material data, per-element phase fractions and SIMP interpolation."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError

__all__ = ["MaterialModel", "DensityField", "effective_modulus"]

# Table 2 moduli of the square-wall study; the last phase is the void surrogate.
WALL_MODULI = (9.0, 3.0, 1.0, 1e-9)
WALL_VOLUME_FRACTIONS = (0.16, 0.08, 0.08, 0.68)


@dataclass(frozen=True)
class MaterialModel:
    phase_moduli: tuple = WALL_MODULI
    poisson_ratio: float = 0.3
    p_exp: float = 3.0

    def __post_init__(self):
        moduli = tuple(float(e) for e in self.phase_moduli)
        object.__setattr__(self, "phase_moduli", moduli)
        if len(moduli) < 2:
            raise ConfigurationError("need at least two phases (one material and void)")
        if any(e <= 0 for e in moduli):
            raise ConfigurationError(f"all phase moduli must be > 0, got {moduli}")
        if not 0.0 < self.poisson_ratio < 0.5:
            raise ConfigurationError(f"poisson_ratio must lie in (0, 0.5), got {self.poisson_ratio}")
        if self.p_exp < 1:
            raise ConfigurationError(f"penalty exponent must be >= 1, got {self.p_exp}")

    @property
    def num_phases(self):
        return len(self.phase_moduli)


class DensityField:
    """Phase fractions ``alpha[i, e]`` for ``num_phases`` phases on an ``nx x ny`` element grid.

    Elements follow the grid numbering ``e = ex * ny + ey``.
    """

    def __init__(self, alpha, nx, ny):
        alpha = np.array(alpha, dtype=float)
        if alpha.ndim != 2 or alpha.shape[1] != nx * ny:
            raise DimensionError(f"alpha has shape {alpha.shape}, expected (phases, {nx * ny})")
        self.alpha = alpha
        self.nx = nx
        self.ny = ny

    @classmethod
    def uniform(cls, fractions, nx, ny):
        fractions = np.asarray(fractions, dtype=float)
        return cls(np.repeat(fractions[:, None], nx * ny, axis=1), nx, ny)

    @property
    def num_phases(self):
        return self.alpha.shape[0]

    @property
    def num_elements(self):
        return self.alpha.shape[1]

    def copy(self):
        return DensityField(self.alpha.copy(), self.nx, self.ny)

    def phase_means(self):
        return self.alpha.mean(axis=1)

    def partition_error(self):
        """Largest deviation of ``sum_i alpha[i, e]`` from one."""
        return float(np.max(np.abs(self.alpha.sum(axis=0) - 1.0)))

    def as_image(self, phase):
        """Phase fractions as an ``(nx, ny)`` array indexed ``[ex, ey]``."""
        return self.alpha[phase].reshape(self.nx, self.ny)


def effective_modulus(alpha_e, mat):
    """SIMP modulus ``sum_i alpha_i**p * E_i``.

    ``alpha_e`` holds the phase fractions along its first axis; extra axes
    (for example one column per element) are carried through.
    """
    alpha_e = np.asarray(alpha_e, dtype=float)
    moduli = np.asarray(mat.phase_moduli)
    if alpha_e.shape[0] != moduli.size:
        raise DimensionError(f"{alpha_e.shape[0]} fractions for {moduli.size} phases")
    weights = moduli.reshape((-1,) + (1,) * (alpha_e.ndim - 1))
    return np.sum(alpha_e ** mat.p_exp * weights, axis=0)
