"""
Spectral Measures
Atoms plus an optional tabulated density on (0, inf), integrated exactly over
the atoms and by the trapezoidal rule over the density grid
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from core.errors import InputError

logger = logging.getLogger(__name__)


def _as_float_array(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} must contain only finite values")
    return arr


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Finite measure on (0, inf): point masses plus a tabulated density"""
    positions: np.ndarray = field(default_factory=lambda: np.empty(0))
    masses: np.ndarray = field(default_factory=lambda: np.empty(0))
    density_grid: np.ndarray = None
    density_values: np.ndarray = None

    def __post_init__(self):
        positions = _as_float_array(self.positions, "atom positions")
        masses = _as_float_array(self.masses, "atom masses")
        if positions.shape != masses.shape:
            raise InputError("atom positions and masses must have the same length")
        if np.any(positions <= 0):
            raise InputError("atom positions must be > 0")
        if np.any(masses <= 0):
            raise InputError("atom masses must be > 0")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "masses", masses)

        if (self.density_grid is None) != (self.density_values is None):
            raise InputError("density grid and density values must be given together")
        if self.density_grid is not None:
            grid = _as_float_array(self.density_grid, "density grid")
            values = _as_float_array(self.density_values, "density values")
            if grid.shape != values.shape or grid.size < 2:
                raise InputError("density grid and values need equal length >= 2")
            if grid[0] <= 0 or np.any(np.diff(grid) <= 0):
                raise InputError("density grid must be positive and strictly increasing")
            if np.any(values < 0):
                raise InputError("density values must be >= 0")
            object.__setattr__(self, "density_grid", grid)
            object.__setattr__(self, "density_values", values)

    @classmethod
    def from_atoms(cls, atoms):
        """Build from an iterable of (position, mass) pairs"""
        atoms = list(atoms)
        if not atoms:
            return cls()
        positions, masses = zip(*atoms)
        return cls(positions=np.array(positions), masses=np.array(masses))

    @property
    def has_density(self):
        return self.density_grid is not None

    def integrate(self, kernel, t):
        """
        Integrate kernel(t, x) against the measure for every t.

        kernel receives t with a trailing axis and x broadcast along it, and
        must return an array of the broadcast shape.
        """
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        if self.positions.size:
            values = kernel(t[..., None], self.positions)
            total = total + np.sum(values * self.masses, axis=-1)
        if self.has_density:
            values = kernel(t[..., None], self.density_grid) * self.density_values
            total = total + trapezoid(values, self.density_grid, axis=-1)
        return total

    def moment(self, weight):
        """Integral of weight(x) against the measure"""
        total = 0.0
        if self.positions.size:
            total += float(np.sum(weight(self.positions) * self.masses))
        if self.has_density:
            total += float(trapezoid(weight(self.density_grid) * self.density_values, self.density_grid))
        return total

    def to_dict(self):
        data = {
            "atoms": [[float(x), float(w)] for x, w in zip(self.positions, self.masses)],
        }
        if self.has_density:
            data["density_grid"] = self.density_grid.tolist()
            data["density_values"] = self.density_values.tolist()
        return data
