"""Test-function families and BMO symbols.

Members are continuous profiles, not grid samples, so one family can be
evaluated on a base grid, on its refinement and on its widening.  Every
member is supported in the inner half of the base grid's box.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional
import logging
import math

import numpy as np

from vexnorm.errors import ArgumentError, ConstructionError, DataError
from vexnorm.exponents import ExponentFunction
from vexnorm.grid import DyadicGrid, GridFunction, shell_index
from vexnorm.norms import bmo_norm, build_ball_family, modular


logger = logging.getLogger(__name__)

KINDS = ("shell_atoms", "gaussians", "random_piecewise", "oscillatory", "powerlaw")

Profile = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TestFunction:
    __test__ = False

    name: str
    profile: Profile = field(repr=False)

    def on(self, grid: DyadicGrid) -> GridFunction:
        return GridFunction.sample(grid, self.profile)


def _radius(points: np.ndarray) -> np.ndarray:
    return np.linalg.norm(points, axis=-1)


def _shell_atom(k: int) -> Profile:
    def profile(points):
        return (shell_index(_radius(points)) == k).astype(np.float64)
    return profile


def _gaussian(center: np.ndarray, width: float, amplitude: float, support: float) -> Profile:
    def profile(points):
        r2 = np.sum((points - center) ** 2, axis=-1)
        return np.where(_radius(points) <= support, amplitude * np.exp(-r2 / width ** 2), 0.0)
    return profile


def _boxes(lows: np.ndarray, highs: np.ndarray, heights: np.ndarray) -> Profile:
    def profile(points):
        out = np.zeros(points.shape[0])
        for lo, hi, c in zip(lows, highs, heights):
            inside = np.all((points >= lo) & (points < hi), axis=-1)
            out += np.where(inside, c, 0.0)
        return out
    return profile


def _oscillation(omega: float, phase: float, support: float) -> Profile:
    def profile(points):
        r = _radius(points)
        envelope = np.clip(1.0 - r / support, 0.0, None)
        return envelope * np.cos(omega * r + phase)
    return profile


def _powerlaw(gamma: float, support: float) -> Profile:
    def profile(points):
        r = _radius(points)
        with np.errstate(divide="ignore"):
            return np.where((r > 0) & (r <= support), r ** -gamma, 0.0)
    return profile


def powerlaw_member(gamma: float, grid: DyadicGrid, q: ExponentFunction) -> TestFunction:
    """|x|^-gamma on the inner half of the box, checked against L^q near the origin."""
    support = 2.0 ** (grid.k_max - 1)
    q_sup = q.bounds(0.0, support)[1]
    limit = grid.n / q_sup
    if gamma >= limit:
        raise ConstructionError("|x|^-{} is not locally in L^q: needs gamma < n/q_plus = {:.6g}".format(gamma, limit))
    member = TestFunction("powerlaw_g{:.4g}".format(gamma), _powerlaw(gamma, support))
    if not math.isfinite(modular(member.on(grid), q, 1.0)):
        raise ConstructionError("modular of {} overflows on {}".format(member.name, grid))
    return member


def family_profiles(kind: str, grid: DyadicGrid, seed: int = 0, size: int = 8,
                    q: Optional[ExponentFunction] = None) -> List[TestFunction]:
    """Deterministic family of ``kind`` for the given seed."""
    if kind not in KINDS:
        raise ArgumentError("unknown family kind '{}', expected one of {}".format(kind, KINDS))
    rng = np.random.default_rng(seed)
    support = 2.0 ** (grid.k_max - 1)
    n = grid.n

    if kind == "shell_atoms":
        return [TestFunction("shell_atom_k{}".format(k), _shell_atom(k))
                for k in range(grid.k_min + 1, grid.k_max)]

    members = []
    if kind == "gaussians":
        for i in range(size):
            center = rng.uniform(-support / 2, support / 2, size=n)
            width = 2.0 ** rng.integers(grid.k_min + 1, max(grid.k_min + 1, grid.k_max - 1), endpoint=True)
            amplitude = rng.uniform(0.5, 2.0)
            members.append(TestFunction("gaussian_{}".format(i), _gaussian(center, width, amplitude, support)))
    elif kind == "random_piecewise":
        side = support / math.sqrt(n)
        for i in range(size):
            pieces = int(rng.integers(1, 5))
            a = rng.uniform(-side, side, size=(pieces, n))
            b = rng.uniform(-side, side, size=(pieces, n))
            heights = rng.uniform(-2.0, 2.0, size=pieces)
            members.append(TestFunction("piecewise_{}".format(i),
                                        _boxes(np.minimum(a, b), np.maximum(a, b), heights)))
    elif kind == "oscillatory":
        for i in range(size):
            omega = math.pi * 2.0 ** rng.uniform(-1.0, grid.level - 2)
            phase = rng.uniform(0.0, 2.0 * math.pi)
            members.append(TestFunction("oscillatory_{}".format(i), _oscillation(omega / support, phase, support)))
    else:
        if q is None:
            raise ArgumentError("powerlaw family needs the source exponent q")
        limit = n / q.bounds(0.0, support)[1]
        for gamma in np.linspace(0.0, limit, size + 1, endpoint=False)[1:]:
            members.append(powerlaw_member(float(gamma), grid, q))
    return members


def build_test_family(kind: str, grid: DyadicGrid, seed: int = 0, size: int = 8,
                      q: Optional[ExponentFunction] = None) -> List[GridFunction]:
    return [member.on(grid) for member in family_profiles(kind, grid, seed, size, q)]


def mixed_profiles(kinds: List[str], grid: DyadicGrid, seed: int, size: int,
                   q: Optional[ExponentFunction] = None) -> List[TestFunction]:
    """Concatenated families with ``size`` members spread over ``kinds``."""
    out = []
    for i, kind in enumerate(kinds):
        share = size // len(kinds) + (1 if i < size % len(kinds) else 0)
        out.extend(family_profiles(kind, grid, seed + i, share, q))
    return out


@dataclass(frozen=True)
class Symbol:
    """A named BMO symbol b: log (ln|x|), constant, linear (x_1) or sign (chi_{x_1 >= 0})."""

    kind: str = "log"
    scale: float = 1.0

    KINDS = ("log", "constant", "linear", "sign")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ArgumentError("unknown symbol '{}', expected one of {}".format(self.kind, self.KINDS))

    def profile(self, points: np.ndarray) -> np.ndarray:
        if self.kind == "log":
            values = np.log(_radius(points))
        elif self.kind == "constant":
            values = np.ones(points.shape[0])
        elif self.kind == "linear":
            values = points[:, 0].copy()
        else:
            values = (points[:, 0] >= 0).astype(np.float64)
        return self.scale * values

    def sample(self, grid: DyadicGrid) -> GridFunction:
        return GridFunction.sample(grid, self.profile)

    def scaled(self, c: float) -> "Symbol":
        return Symbol(self.kind, self.scale * c)

    def describe(self) -> Dict[str, object]:
        return {"kind": self.kind, "scale": self.scale}


def check_bmo_symbol(symbol: Symbol, grid: DyadicGrid, threshold: float = 1.5, seed: int = 0) -> float:
    """BMO norm of the symbol on ``grid``; DataError when it blows up on the widened grid."""
    base = bmo_norm(symbol.sample(grid), build_ball_family(grid, seed=seed))
    wide_grid = grid.widened()
    wide = bmo_norm(symbol.sample(wide_grid), build_ball_family(wide_grid, seed=seed))
    if base == 0.0:
        if wide > 0.0:
            raise DataError("symbol {} has zero oscillation on {} but not on the widened grid".format(symbol, grid))
        return 0.0
    growth = wide / base
    logger.debug("bmo of {}: {:.6g} -> {:.6g} on the widened grid".format(symbol, base, wide))
    if growth > threshold:
        raise DataError("symbol {} is not in BMO: oscillation grows by {:.3g} when the box doubles".format(symbol, growth))
    return base
