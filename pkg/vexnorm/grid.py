"""Uniform Cartesian grids on R^n \\ {0} organised by dyadic annuli.

The box [-2^k_max, 2^k_max]^n is split into 2^(L+1) cells per axis with
spacing h = 2^(k_max - L).  A cell belongs to shell k when its center x
satisfies 2^(k-1) < |x| <= 2^k.  Only cells in shells k_min < k <= k_max are
part of the domain; the core |x| <= 2^k_min and (for n = 2) the box corners
outside B_kmax are masked out.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, List, Tuple, Union
import logging

import numpy as np

from vexnorm import settings
from vexnorm.errors import ArgumentError, DataError, ResourceError


logger = logging.getLogger(__name__)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def shell_index(radius: np.ndarray) -> np.ndarray:
    """Smallest integer k with radius <= 2^k, exact for powers of two."""
    mantissa, exponent = np.frexp(np.asarray(radius, dtype=np.float64))
    return np.where(mantissa == 0.5, exponent - 1, exponent).astype(np.int64)


@dataclass(frozen=True, eq=False)
class DyadicGrid:
    n: int
    k_min: int
    k_max: int
    level: int
    h: float
    axis: np.ndarray
    radius: np.ndarray
    shell: np.ndarray
    mask: np.ndarray

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.radius.shape

    @property
    def cell_measure(self) -> float:
        return self.h ** self.n

    @property
    def size(self) -> int:
        """Number of cells inside the domain."""
        return int(np.count_nonzero(self.mask))

    @property
    def shells(self) -> range:
        return range(self.k_min + 1, self.k_max + 1)

    @cached_property
    def points(self) -> np.ndarray:
        """Cell centers, shape ``grid.shape + (n,)``."""
        mesh = np.meshgrid(*([self.axis] * self.n), indexing="ij")
        return _readonly(np.stack(mesh, axis=-1))

    def centers(self) -> np.ndarray:
        """Centers of the domain cells in C order, shape (size, n)."""
        return self.points[self.mask]

    def cells(self) -> List[Tuple[Tuple[float, ...], float]]:
        measure = self.cell_measure
        return [(tuple(float(c) for c in center), measure) for center in self.centers()]

    def shell_of(self, index: Tuple[int, ...]) -> int:
        if not self.mask[index]:
            raise ArgumentError("cell {} is outside the shell range ({}, {}]".format(index, self.k_min, self.k_max))
        return int(self.shell[index])

    def check_shell(self, k: int) -> None:
        if not (self.k_min < k <= self.k_max):
            raise ArgumentError("shell index {} outside ({}, {}]".format(k, self.k_min, self.k_max))

    def shell_mask(self, k: int) -> np.ndarray:
        self.check_shell(k)
        return self.mask & (self.shell == k)

    def ball_mask(self, k: int) -> np.ndarray:
        self.check_shell(k)
        return self.mask & (self.shell <= k)

    def measure(self, mask: np.ndarray) -> float:
        return float(np.count_nonzero(mask & self.mask)) * self.cell_measure

    def refined(self) -> "DyadicGrid":
        """Same shell range, half the spacing."""
        return build_grid(self.n, self.k_min, self.k_max, self.level + 1)

    def widened(self) -> "DyadicGrid":
        """One more outer shell at the same spacing."""
        return build_grid(self.n, self.k_min, self.k_max + 1, self.level + 1)

    def describe(self) -> dict:
        return {"n": self.n, "k_min": self.k_min, "k_max": self.k_max, "level": self.level, "h": self.h}

    def __repr__(self):
        return "DyadicGrid(n={}, k_min={}, k_max={}, L={}, h={}, cells={})".format(
            self.n, self.k_min, self.k_max, self.level, self.h, self.size)


def build_grid(n: int, k_min: int, k_max: int, level: int, max_cells: int = None) -> DyadicGrid:
    if n not in (1, 2):
        raise ArgumentError("dimension must be 1 or 2, got {}".format(n))
    if not k_min < k_max:
        raise ArgumentError("empty shell range: k_min={} must be < k_max={}".format(k_min, k_max))
    if level < 1:
        raise ArgumentError("refinement level must be >= 1, got {}".format(level))

    budget = settings.max_cells if max_cells is None else max_cells
    per_axis = 2 ** (level + 1)
    if per_axis ** n > budget:
        raise ResourceError("grid needs {} cells, budget is {}".format(per_axis ** n, budget))

    h = 2.0 ** (k_max - level)
    half = 2.0 ** k_max
    axis = -half + h * (np.arange(per_axis, dtype=np.float64) + 0.5)

    if n == 1:
        radius = np.abs(axis)
    else:
        radius = np.hypot(axis[:, None], axis[None, :])

    shell = shell_index(radius)
    mask = (shell > k_min) & (shell <= k_max)

    grid = DyadicGrid(n=n, k_min=k_min, k_max=k_max, level=level, h=h,
                      axis=_readonly(axis), radius=_readonly(radius),
                      shell=_readonly(shell), mask=_readonly(mask))
    logger.debug("built {}".format(grid))
    return grid


Profile = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples on the domain cells of a grid; zero off the domain."""
    grid: DyadicGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.shape != self.grid.shape:
            values = np.broadcast_to(values, self.grid.shape).copy()
        if not np.all(np.isfinite(values[self.grid.mask])):
            raise DataError("grid function has non-finite values on the domain")
        values[~self.grid.mask] = 0.0
        object.__setattr__(self, "values", _readonly(values))

    @classmethod
    def sample(cls, grid: DyadicGrid, profile: Profile) -> "GridFunction":
        values = np.zeros(grid.shape)
        values[grid.mask] = profile(grid.points[grid.mask])
        return cls(grid, values)

    @classmethod
    def zeros(cls, grid: DyadicGrid) -> "GridFunction":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: DyadicGrid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.shape, float(c)))

    def integral(self) -> float:
        return float(np.sum(self.values)) * self.grid.cell_measure

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def on_domain(self) -> np.ndarray:
        return self.values[self.grid.mask]

    def _other(self, other: Union["GridFunction", float]) -> Union[np.ndarray, float]:
        if isinstance(other, GridFunction):
            if other.grid is not self.grid:
                raise ArgumentError("grid functions live on different grids")
            return other.values
        return float(other)

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __abs__(self):
        return GridFunction(self.grid, np.abs(self.values))

    def __pow__(self, m: int):
        return GridFunction(self.grid, self.values ** m)


def restrict_to_shell(f: GridFunction, k: int) -> GridFunction:
    """f * chi_{A_k}."""
    return restrict_to_mask(f, f.grid.shell_mask(k))


def restrict_to_mask(f: GridFunction, mask: np.ndarray) -> GridFunction:
    return GridFunction(f.grid, np.where(mask, f.values, 0.0))


def characteristic_ball(grid: DyadicGrid, k: int) -> GridFunction:
    """chi_{B_k} with B_k = {|x| <= 2^k}, restricted to the domain."""
    return indicator(grid, grid.ball_mask(k))


def characteristic_shell(grid: DyadicGrid, k: int) -> GridFunction:
    return indicator(grid, grid.shell_mask(k))


def indicator(grid: DyadicGrid, mask: np.ndarray) -> GridFunction:
    return GridFunction(grid, np.asarray(mask, dtype=np.float64))
