"""Radial variable exponents q(x) = Q(|x|) and the log-Hölder certificates.

Every exponent in the library is radial, which keeps inf/sup over a shell
range exact (each family is monotone in |x|) and lets the continuity check
sample pairs along rays, where |x - y| equals the radius difference.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import copy
import logging
import math

import numpy as np

from vexnorm.errors import ArgumentError
from vexnorm.grid import DyadicGrid


logger = logging.getLogger(__name__)


class ExponentFunction:
    """Base class; subclasses implement :meth:`profile` and :meth:`bounds`.

    ``q_minus`` and ``q_plus`` are the inf/sup over the grid box once the
    exponent is bound with :meth:`bound_to`, and over all of R^n before that.
    """

    name = "exponent"
    box: Optional[Tuple[float, float]] = None

    def profile(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bounds(self, r_min: float = 0.0, r_max: float = math.inf) -> Tuple[float, float]:
        """Exact (inf, sup) of the profile over r_min <= r <= r_max."""
        raise NotImplementedError

    @property
    def q_minus(self) -> float:
        return (self.box or self.bounds())[0]

    @property
    def q_plus(self) -> float:
        return (self.box or self.bounds())[1]

    def in_class_p(self) -> bool:
        lo, hi = self.bounds()
        return lo > 1.0 and math.isfinite(hi)

    def bounds_on(self, grid: DyadicGrid) -> Tuple[float, float]:
        return self.bounds(2.0 ** grid.k_min, 2.0 ** grid.k_max)

    def bound_to(self, grid: DyadicGrid) -> "ExponentFunction":
        """A copy whose q_minus / q_plus are cached for the box of ``grid``."""
        bound = copy.copy(self)
        bound.box = self.bounds_on(grid)
        return bound

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 0:
            return self.profile(np.abs(x))
        return self.profile(np.linalg.norm(x, axis=-1))

    def on_grid(self, grid: DyadicGrid) -> np.ndarray:
        return self.profile(grid.radius)

    def describe(self) -> Dict[str, float]:
        return {"family": self.name}

    def __repr__(self):
        params = ", ".join("{}={}".format(k, v) for k, v in self.describe().items() if k != "family")
        return "{}({})".format(type(self).__name__, params)


def _monotone_bounds(q: ExponentFunction, r_min: float, r_max: float, limit: float) -> Tuple[float, float]:
    start = float(q.profile(np.float64(r_min)))
    end = limit if math.isinf(r_max) else float(q.profile(np.float64(r_max)))
    return min(start, end), max(start, end)


def _require_class_p(q: ExponentFunction) -> None:
    lo, hi = q.bounds()
    if not (lo > 1.0 and math.isfinite(hi)):
        raise ArgumentError("{!r} is not in class P: q_minus={}, q_plus={}".format(q, lo, hi))


class Constant(ExponentFunction):
    name = "constant"

    def __init__(self, q0: float):
        self.q0 = float(q0)
        _require_class_p(self)

    def profile(self, r):
        return np.full(np.shape(r), self.q0) if np.ndim(r) else np.float64(self.q0)

    def bounds(self, r_min=0.0, r_max=math.inf):
        return self.q0, self.q0

    def describe(self):
        return {"family": self.name, "q0": self.q0}


class LogDecay(ExponentFunction):
    """q(x) = q_inf + a / ln(e + |x|)."""

    name = "logdecay"

    def __init__(self, qinf: float, a: float):
        self.qinf = float(qinf)
        self.a = float(a)
        _require_class_p(self)

    def profile(self, r):
        return self.qinf + self.a / np.log(math.e + r)

    def bounds(self, r_min=0.0, r_max=math.inf):
        return _monotone_bounds(self, r_min, r_max, self.qinf)

    def describe(self):
        return {"family": self.name, "qinf": self.qinf, "a": self.a}


class GaussBump(ExponentFunction):
    """q(x) = q0 + a * exp(-|x|^2 / s^2)."""

    name = "gaussbump"

    def __init__(self, q0: float, a: float, s: float):
        if s <= 0:
            raise ArgumentError("bump width must be positive, got {}".format(s))
        self.q0 = float(q0)
        self.a = float(a)
        self.s = float(s)
        _require_class_p(self)

    def profile(self, r):
        return self.q0 + self.a * np.exp(-(r / self.s) ** 2)

    def bounds(self, r_min=0.0, r_max=math.inf):
        return _monotone_bounds(self, r_min, r_max, self.q0)

    def describe(self):
        return {"family": self.name, "q0": self.q0, "a": self.a, "s": self.s}


class Conjugate(ExponentFunction):
    """q'(x) = q(x) / (q(x) - 1), evaluated from the base exponent."""

    name = "conjugate"

    def __init__(self, base: ExponentFunction):
        self.base = base

    def profile(self, r):
        q = self.base.profile(r)
        return q / (q - 1.0)

    def bounds(self, r_min=0.0, r_max=math.inf):
        lo, hi = self.base.bounds(r_min, r_max)
        return hi / (hi - 1.0), lo / (lo - 1.0)

    def describe(self):
        return {"family": self.name, "base": repr(self.base)}


class SobolevPartner(ExponentFunction):
    """q2 with 1/q1(x) - 1/q2(x) = beta/n."""

    name = "sobolev"

    def __init__(self, base: ExponentFunction, beta: float, n: int):
        self.base = base
        self.beta = float(beta)
        self.n = int(n)

    def profile(self, r):
        return 1.0 / (1.0 / self.base.profile(r) - self.beta / self.n)

    def bounds(self, r_min=0.0, r_max=math.inf):
        lo, hi = self.base.bounds(r_min, r_max)
        shift = self.beta / self.n
        return 1.0 / (1.0 / lo - shift), 1.0 / (1.0 / hi - shift)

    def describe(self):
        return {"family": self.name, "base": repr(self.base), "beta": self.beta, "n": self.n}


def evaluate(q: ExponentFunction, x) -> float:
    """q at a single point x (a scalar for n = 1 or a coordinate sequence)."""
    return float(q(x))


def conjugate(q: ExponentFunction) -> ExponentFunction:
    lo = q.bounds()[0]
    if not lo > 1.0:
        raise ArgumentError("conjugate exponent needs q_minus > 1, got {}".format(lo))
    return Conjugate(q)


def sobolev_partner(q1: ExponentFunction, beta: float, n: int) -> ExponentFunction:
    # q1_plus over all of R^n
    upper = n / q1.bounds()[1]
    if not (0.0 < beta < upper):
        raise ArgumentError("beta={} must lie in (0, n/q1_plus) = (0, {})".format(beta, upper))
    return SobolevPartner(q1, beta, n)


FAMILIES = {
    "constant": (Constant, ("q0",)),
    "logdecay": (LogDecay, ("qinf", "a")),
    "gaussbump": (GaussBump, ("q0", "a", "s")),
}


def from_spec(spec: Dict) -> ExponentFunction:
    """Build an exponent from its config form, e.g. {family="logdecay", qinf=2.0, a=1.0}."""
    family = str(spec.get("family", "")).lower()
    if family not in FAMILIES:
        raise ArgumentError("unknown exponent family '{}', expected one of {}".format(family, sorted(FAMILIES)))
    cls, names = FAMILIES[family]
    missing = [name for name in names if name not in spec]
    if missing:
        raise ArgumentError("exponent family '{}' is missing {}".format(family, missing))
    return cls(*(float(spec[name]) for name in names))


@dataclass
class LogHolderReport:
    c_local: float
    c_infinity: float
    local_profile: List[float] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return math.isfinite(self.c_local) and math.isfinite(self.c_infinity)

    def as_dict(self):
        return {"C_local": self.c_local, "C_infinity": self.c_infinity}


def _local_term(dq: np.ndarray, d: np.ndarray) -> float:
    if dq.size == 0:
        return 0.0
    return float(np.max(dq * -np.log(d)))


def _decay_term_radial(q_vals: np.ndarray, r: np.ndarray) -> float:
    order = np.argsort(r, kind="stable")
    r = r[order]
    q_vals = q_vals[order]
    tail_max = np.maximum.accumulate(q_vals[::-1])[::-1]
    tail_min = np.minimum.accumulate(q_vals[::-1])[::-1]
    spread = np.maximum(tail_max - q_vals, q_vals - tail_min)
    return float(np.max(spread * np.log(math.e + r))) if r.size else 0.0


def check_log_holder(q: ExponentFunction, grid: DyadicGrid, random_pairs: int = 10_000,
                     seed: int = 0, lattice_levels: int = 4, growth: float = 0.01) -> LogHolderReport:
    """Sample-based constants for the local and decay log-Hölder conditions.

    C_local is max |q(x)-q(y)| * (-ln|x-y|) over sampled pairs with |x-y| <= 1/2,
    C_infinity is max |q(x)-q(y)| * ln(e+|x|) over sampled pairs with |y| >= |x|.
    C_local is reported as +inf when the nearest-neighbour term keeps growing
    while the lattice spacing is halved.
    """
    q_box = q.on_grid(grid)
    mask = grid.mask
    c_local = 0.0

    # grid node pairs along each axis at dyadic offsets
    shift = 1
    while shift * grid.h <= 0.5 and shift < grid.shape[0]:
        for ax in range(grid.n):
            head = [slice(None)] * grid.n
            tail = [slice(None)] * grid.n
            head[ax] = slice(shift, None)
            tail[ax] = slice(None, -shift)
            valid = mask[tuple(head)] & mask[tuple(tail)]
            dq = np.abs(q_box[tuple(head)] - q_box[tuple(tail)])[valid]
            c_local = max(c_local, _local_term(dq, np.full(dq.shape, shift * grid.h)))
        shift *= 2

    lo_r, hi_r = 2.0 ** grid.k_min, 2.0 ** grid.k_max
    rng = np.random.default_rng(seed)
    x = rng.uniform(-hi_r, hi_r, size=(random_pairs, grid.n))
    d = np.exp(rng.uniform(math.log(grid.h / 64.0), math.log(0.5), size=random_pairs))
    u = rng.normal(size=(random_pairs, grid.n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    y = x + d[:, None] * u
    rx, ry = np.linalg.norm(x, axis=1), np.linalg.norm(y, axis=1)
    inside = (rx > lo_r) & (rx <= hi_r) & (ry > lo_r) & (ry <= hi_r)
    qx, qy = q.profile(rx), q.profile(ry)
    c_local = max(c_local, _local_term(np.abs(qx - qy)[inside], d[inside]))

    near = np.minimum(rx, ry)
    spread = np.abs(qx - qy)[inside] * np.log(math.e + near[inside])
    c_infinity = float(np.max(spread)) if spread.size else 0.0
    c_infinity = max(c_infinity, _decay_term_radial(q_box[mask], grid.radius[mask]))

    # refined radial lattices
    profile = []
    spacing = min(grid.h, 0.25)
    for level in range(lattice_levels):
        step = spacing / 2 ** level
        r = lo_r + step * (np.arange(int((hi_r - lo_r) / step)) + 0.5)
        values = q.profile(r)
        profile.append(_local_term(np.abs(np.diff(values)), np.full(r.size - 1, step)))
    rising = all(b > a * (1.0 + growth) for a, b in zip(profile, profile[1:]))
    if rising and profile[0] > 0.0:
        logger.info("local log-Hölder term grows under refinement: {}".format(profile))
        c_local = math.inf
    else:
        c_local = max(c_local, max(profile) if profile else 0.0)

    return LogHolderReport(c_local=c_local, c_infinity=c_infinity, local_profile=profile)
