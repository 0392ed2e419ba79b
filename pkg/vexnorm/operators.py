"""Maximal operator, fractional integral I_beta and its m-order commutators."""
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional
import logging
import math

import numpy as np
from scipy.signal import fftconvolve

from vexnorm.errors import ArgumentError
from vexnorm.grid import DyadicGrid, GridFunction, characteristic_ball


logger = logging.getLogger(__name__)

ENGINES = ("direct", "fft")

# entries of the pairwise block evaluated at once by the direct engine
DIRECT_BLOCK_ENTRIES = 2 ** 22

# subcells per axis for the midpoint rule on the part of a 2-D cell outside its inscribed disk
DIAGONAL_SUBCELLS = 32

# kernels kept alive at once: one grid with its refined and widened copies
KERNEL_CACHE_SIZE = 3


def _check_beta(beta: float, n: int) -> None:
    if not (0.0 < beta < n):
        raise ArgumentError("beta={} must lie in (0, n) = (0, {})".format(beta, n))


def diagonal_weight(n: int, beta: float, h: float) -> float:
    """Integral of |t|^(beta-n) over one cell of side h centred at t = 0."""
    if n == 1:
        return 2.0 * (h / 2.0) ** beta / beta
    # unit cell: exact over the inscribed disk, midpoint rule on the corners
    disk = 2.0 * math.pi * 0.5 ** beta / beta
    s = DIAGONAL_SUBCELLS
    t = (np.arange(s) + 0.5) / s - 0.5
    r = np.hypot(t[:, None], t[None, :])
    corners = float(np.sum(r[r > 0.5] ** (beta - 2.0))) / s ** 2
    return h ** beta * (disk + corners)


@lru_cache(maxsize=KERNEL_CACHE_SIZE)
def offset_kernel(grid: DyadicGrid, beta: float) -> np.ndarray:
    """Quadrature weights of |x - y|^(beta - n) indexed by the cell offset x - y."""
    m = grid.shape[0]
    d = np.arange(-(m - 1), m, dtype=np.float64) * grid.h
    if grid.n == 1:
        dist = np.abs(d)
    else:
        dist = np.hypot(d[:, None], d[None, :])
    center = (m - 1,) * grid.n
    dist[center] = 1.0
    kernel = dist ** (beta - grid.n) * grid.cell_measure
    kernel[center] = diagonal_weight(grid.n, beta, grid.h)
    kernel.setflags(write=False)
    return kernel


def _direct(f: GridFunction, beta: float, b: Optional[GridFunction] = None, m: int = 0) -> np.ndarray:
    grid = f.grid
    targets = grid.centers()
    source_values = f.on_domain()
    nonzero = source_values != 0.0
    sources = targets[nonzero]
    weights_f = source_values[nonzero]
    b_targets = b.on_domain() if b is not None else None
    b_sources = b_targets[nonzero] if b is not None else None

    diag = diagonal_weight(grid.n, beta, grid.h)
    measure = grid.cell_measure
    out = np.zeros(len(targets))
    if len(sources) == 0:
        return _scatter(grid, out)

    rows = max(1, DIRECT_BLOCK_ENTRIES // len(sources))
    for start in range(0, len(targets), rows):
        x = targets[start:start + rows]
        dist = np.linalg.norm(x[:, None, :] - sources[None, :, :], axis=-1)
        same = dist == 0.0
        with np.errstate(divide="ignore"):
            w = dist ** (beta - grid.n) * measure
        w[same] = diag
        if m:
            w *= (b_targets[start:start + rows, None] - b_sources[None, :]) ** m
        out[start:start + rows] = np.sum(w * weights_f[None, :], axis=1)
    return _scatter(grid, out)


def _scatter(grid: DyadicGrid, domain_values: np.ndarray) -> np.ndarray:
    full = np.zeros(grid.shape)
    full[grid.mask] = domain_values
    return full


def _fft(f: GridFunction, beta: float) -> np.ndarray:
    grid = f.grid
    out = fftconvolve(f.values, offset_kernel(grid, beta), mode="same")
    return np.where(grid.mask, out, 0.0)


def fractional_integral(f: GridFunction, beta: float, engine: str = "fft") -> GridFunction:
    """I_beta f(x) = integral of f(y) |x - y|^(beta - n) dy.

    Off-diagonal cells use the midpoint rule; the cell containing x uses the
    analytic integral of the kernel over that cell times f(x).
    """
    _check_beta(beta, f.grid.n)
    if engine == "direct":
        return GridFunction(f.grid, _direct(f, beta))
    if engine == "fft":
        return GridFunction(f.grid, _fft(f, beta))
    raise ArgumentError("unknown engine '{}', expected one of {}".format(engine, ENGINES))


@dataclass(frozen=True)
class FracIntegralSpec:
    beta: float
    m: int = 0
    b: Optional[GridFunction] = None
    engine: str = "fft"

    def __post_init__(self):
        if self.m < 0:
            raise ArgumentError("commutator order must be >= 0, got {}".format(self.m))
        if self.m >= 1 and self.b is None:
            raise ArgumentError("commutator of order {} needs a symbol b".format(self.m))
        if self.engine not in ENGINES:
            raise ArgumentError("unknown engine '{}', expected one of {}".format(self.engine, ENGINES))

    def validate(self, grid: DyadicGrid) -> None:
        _check_beta(self.beta, grid.n)
        if self.b is not None and self.b.grid is not grid:
            raise ArgumentError("symbol b lives on a different grid")

    def with_symbol(self, b: Optional[GridFunction]) -> "FracIntegralSpec":
        return FracIntegralSpec(beta=self.beta, m=self.m, b=b, engine=self.engine)


def commutator(f: GridFunction, spec: FracIntegralSpec) -> GridFunction:
    """I^m_{beta,b} f(x) = integral of f(y) (b(x) - b(y))^m |x - y|^(beta - n) dy."""
    spec.validate(f.grid)
    if spec.m == 0:
        return fractional_integral(f, spec.beta, spec.engine)
    if spec.engine == "fft" and spec.m == 1:
        b = spec.b
        return b * fractional_integral(f, spec.beta, "fft") - fractional_integral(b * f, spec.beta, "fft")
    if spec.engine == "fft":
        logger.debug("order {} commutator has no fft path, using the direct engine".format(spec.m))
    return GridFunction(f.grid, _direct(f, spec.beta, spec.b, spec.m))


def maximal(f: GridFunction) -> GridFunction:
    """Mf(x) = max over r = 2^j h of r^-n * integral of |f| over B(x, r).

    Balls are open and contain the cells whose centers lie closer than r.
    """
    grid = f.grid
    m = grid.shape[0]
    absf = np.abs(f.values)
    best = np.zeros(grid.shape)
    reach = math.sqrt(grid.n) * (m - 1)
    for j in range(grid.k_max - grid.k_min + grid.level + 1):
        width = 2 ** j
        w = min(width - 1, m - 1)
        d = np.arange(-w, w + 1, dtype=np.float64)
        if grid.n == 1:
            footprint = (np.abs(d) < width).astype(np.float64)
        else:
            footprint = (np.hypot(d[:, None], d[None, :]) < width).astype(np.float64)
        sums = np.maximum(fftconvolve(absf, footprint, mode="same"), 0.0)
        r = width * grid.h
        np.maximum(best, sums * grid.cell_measure / r ** grid.n, out=best)
        if width > reach:
            break
    return GridFunction(grid, np.where(grid.mask, best, 0.0))


def kernel_bound_constants(grid: DyadicGrid, beta: float, engine: str = "fft") -> Dict[int, float]:
    """Smallest C_k with chi_{B_k} <= C_k 2^{-k beta} I_beta(chi_{B_k}) on B_k."""
    out = {}
    for k in grid.shells:
        chi = characteristic_ball(grid, k)
        inside = chi.values > 0
        if not np.any(inside):
            continue
        potential = fractional_integral(chi, beta, engine).values[inside]
        out[k] = float(np.max(2.0 ** (k * beta) / potential))
    return out
