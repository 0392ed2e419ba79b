"""Modular, Luxemburg, BMO and Herz-Morrey norms on grid functions."""
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple, Union
import logging

import numpy as np

from vexnorm.errors import ArgumentError
from vexnorm.exponents import ExponentFunction, conjugate
from vexnorm.grid import DyadicGrid, GridFunction, characteristic_ball, indicator, restrict_to_shell


logger = logging.getLogger(__name__)

BISECTION_STEPS = 60
RELATIVE_TOLERANCE = 1e-8


def _modular_terms(u: np.ndarray, q_vals: np.ndarray, eta: float, measure: float) -> float:
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        terms = np.power(u / eta, q_vals)
    return float(np.sum(terms)) * measure


def modular(f: GridFunction, q: ExponentFunction, eta: float) -> float:
    """Sum over cells of (|f|/eta)^q(x) times the cell measure."""
    if not eta > 0:
        raise ArgumentError("modular needs eta > 0, got {}".format(eta))
    grid = f.grid
    return _modular_terms(np.abs(f.on_domain()), q.on_grid(grid)[grid.mask], float(eta), grid.cell_measure)


def luxemburg_norm(f: GridFunction, q: ExponentFunction, rel_tol: float = RELATIVE_TOLERANCE,
                   steps: int = BISECTION_STEPS) -> float:
    """inf{eta > 0 : modular(f, q, eta) <= 1}.

    The function is scaled to max|f| = 1 first, so the bracket search starts
    at eta = 1 and the result is exactly homogeneous in the scale.
    """
    grid = f.grid
    values = np.abs(f.on_domain())
    scale = float(np.max(values)) if values.size else 0.0
    if scale == 0.0:
        return 0.0
    support = values > 0
    u = values[support] / scale
    q_vals = q.on_grid(grid)[grid.mask][support]
    measure = grid.cell_measure

    def rho(eta):
        return _modular_terms(u, q_vals, eta, measure)

    # hi always satisfies rho(hi) <= 1, lo always rho(lo) > 1
    eta = 1.0
    if rho(eta) <= 1.0:
        hi = eta
        lo = eta / 2.0
        while rho(lo) <= 1.0:
            hi = lo
            lo /= 2.0
    else:
        lo = eta
        hi = eta * 2.0
        while rho(hi) > 1.0:
            lo = hi
            hi *= 2.0

    for _ in range(steps):
        if hi - lo <= rel_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if rho(mid) <= 1.0:
            hi = mid
        else:
            lo = mid

    return scale * hi


def classical_lp_norm(f: GridFunction, p: float) -> float:
    """(sum |f|^p * measure)^(1/p), the constant-exponent closed form."""
    values = np.abs(f.on_domain())
    return float(np.sum(values ** p) * f.grid.cell_measure) ** (1.0 / p)


def mean_on_set(f: GridFunction, mask: Union[np.ndarray, GridFunction]) -> float:
    """f_S = |S|^-1 * integral of f over S."""
    if isinstance(mask, GridFunction):
        mask = mask.values != 0
    selected = np.asarray(mask, dtype=bool) & f.grid.mask
    if not np.any(selected):
        raise ArgumentError("mean over a set with zero grid measure")
    return float(np.mean(f.values[selected]))


@dataclass(frozen=True)
class HerzMorreyParams:
    alpha: float
    lam: float
    p: float
    q: ExponentFunction

    def __post_init__(self):
        if not self.p > 0:
            raise ArgumentError("Herz-Morrey p must be positive, got {}".format(self.p))
        if not self.lam >= 0:
            raise ArgumentError("Herz-Morrey lambda must be >= 0, got {}".format(self.lam))


@dataclass
class HerzMorreyProfile:
    shells: np.ndarray
    shell_norms: np.ndarray
    terms: np.ndarray
    k0: int
    value: float


def shell_norms(f: GridFunction, q: ExponentFunction) -> np.ndarray:
    """||f chi_k||_q for k = k_min+1 .. k_max."""
    grid = f.grid
    out = np.zeros(len(grid.shells))
    for i, k in enumerate(grid.shells):
        out[i] = luxemburg_norm(restrict_to_shell(f, k), q)
    return out


def herz_morrey_from_shell_norms(shells: np.ndarray, norms: np.ndarray, alpha: float,
                                 lam: float, p: float) -> Tuple[np.ndarray, int, float]:
    """Per-k0 terms 2^{-k0 lam} (sum_{k<=k0} 2^{k alpha p} N_k^p)^{1/p}, argmax and max."""
    shells = np.asarray(shells, dtype=np.float64)
    partial = np.cumsum(np.exp2(shells * alpha * p) * np.asarray(norms) ** p)
    terms = np.exp2(-shells * lam) * partial ** (1.0 / p)
    best = int(np.argmax(terms))
    return terms, int(shells[best]), float(terms[best])


def herz_morrey_profile(f: GridFunction, params: HerzMorreyParams) -> HerzMorreyProfile:
    grid = f.grid
    shells = np.arange(grid.k_min + 1, grid.k_max + 1)
    norms = shell_norms(f, params.q)
    terms, k0, value = herz_morrey_from_shell_norms(shells, norms, params.alpha, params.lam, params.p)
    return HerzMorreyProfile(shells=shells, shell_norms=norms, terms=terms, k0=k0, value=value)


def herz_morrey_norm(f: GridFunction, params: HerzMorreyParams) -> float:
    """Truncated MK^{alpha,lambda}_{p,q(.)} norm, sup over k0 in the shell range."""
    return herz_morrey_profile(f, params).value


def herz_norm(f: GridFunction, q: ExponentFunction, alpha: float, p: float) -> float:
    """Truncated K^{alpha,p}_{q(.)} norm (sum over every shell)."""
    grid = f.grid
    shells = np.arange(grid.k_min + 1, grid.k_max + 1, dtype=np.float64)
    norms = shell_norms(f, q)
    return float(np.sum(np.exp2(shells * alpha * p) * norms ** p) ** (1.0 / p))


@dataclass(frozen=True)
class BallFamily:
    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        if len(self.radii) == 0:
            raise ArgumentError("ball family is empty")

    def __len__(self):
        return len(self.radii)

    def masks(self, grid: DyadicGrid) -> Iterator[Tuple[int, np.ndarray]]:
        """(index, domain mask) for every ball meeting the domain."""
        for i, (center, radius) in enumerate(zip(self.centers, self.radii)):
            dist = np.linalg.norm(grid.points - center, axis=-1)
            selected = (dist <= radius) & grid.mask
            if np.any(selected):
                yield i, selected


def build_ball_family(grid: DyadicGrid, centers: int = 16, seed: int = 0) -> BallFamily:
    """Dyadic radii 2^j, j in [k_min, k_max], around the origin and sampled domain cells."""
    radii = np.exp2(np.arange(grid.k_min, grid.k_max + 1, dtype=np.float64))
    domain = grid.centers()
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(domain), size=min(centers, len(domain)), replace=False)
    points = np.vstack([np.zeros((1, grid.n)), domain[np.sort(picked)]])
    all_centers = np.repeat(points, len(radii), axis=0)
    all_radii = np.tile(radii, len(points))
    return BallFamily(centers=all_centers, radii=all_radii)


def mean_oscillations(b: GridFunction, balls: BallFamily) -> np.ndarray:
    """|B|^-1 integral_B |b - b_B| for every ball (nan where the ball misses the domain)."""
    out = np.full(len(balls), np.nan)
    for i, selected in balls.masks(b.grid):
        values = b.values[selected]
        out[i] = float(np.mean(np.abs(values - np.mean(values))))
    return out


def bmo_norm(b: GridFunction, balls: BallFamily) -> float:
    """Sup of the mean oscillation over a finite ball family (a lower bound of ||b||_BMO)."""
    osc = mean_oscillations(b, balls)
    return float(np.nanmax(osc)) if np.any(np.isfinite(osc)) else 0.0


@dataclass
class HolderPair:
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def holder_constant(q: ExponentFunction, grid: DyadicGrid) -> float:
    """r_q = 1 + 1/q_minus - 1/q_plus on the grid's shell range."""
    q = q.bound_to(grid)
    return 1.0 + 1.0 / q.q_minus - 1.0 / q.q_plus


def holder_pair(f: GridFunction, g: GridFunction, q: ExponentFunction) -> HolderPair:
    lhs = float(np.sum(np.abs(f.values * g.values))) * f.grid.cell_measure
    rhs = holder_constant(q, f.grid) * luxemburg_norm(f, q) * luxemburg_norm(g, conjugate(q))
    return HolderPair(lhs=lhs, rhs=rhs)


def ball_norms(q: ExponentFunction, grid: DyadicGrid) -> Dict[int, float]:
    """||chi_{B_k}||_q for every shell index k."""
    return {k: luxemburg_norm(characteristic_ball(grid, k), q) for k in grid.shells}


def nested_ball_ratios(q: ExponentFunction, grid: DyadicGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Measure ratios |S|/|B| and norm ratios ||chi_S||/||chi_B|| over nested S = B_j in B = B_k, j < k."""
    norms = ball_norms(q, grid)
    measures = {k: grid.measure(grid.ball_mask(k)) for k in grid.shells}
    measure_ratio, norm_ratio = [], []
    for k in grid.shells:
        for j in grid.shells:
            if j >= k or measures[j] == 0.0 or norms[j] == 0.0:
                continue
            measure_ratio.append(measures[j] / measures[k])
            norm_ratio.append(norms[j] / norms[k])
    return np.array(measure_ratio), np.array(norm_ratio)


def duality_products(q: ExponentFunction, grid: DyadicGrid) -> Dict[int, float]:
    """|B_k|^-1 ||chi_{B_k}||_q ||chi_{B_k}||_q' per shell index k."""
    q_conj = conjugate(q)
    out = {}
    for k in grid.shells:
        chi = characteristic_ball(grid, k)
        measure = grid.measure(grid.ball_mask(k))
        if measure == 0.0:
            continue
        out[k] = luxemburg_norm(chi, q) * luxemburg_norm(chi, q_conj) / measure
    return out


def oscillation_ratios(b: GridFunction, q: ExponentFunction, balls: BallFamily, m: int) -> np.ndarray:
    """||(b - b_B)^m chi_B||_q / ||chi_B||_q for every ball of the family."""
    grid = b.grid
    out = np.full(len(balls), np.nan)
    for i, selected in balls.masks(grid):
        centered = np.where(selected, b.values - np.mean(b.values[selected]), 0.0)
        top = luxemburg_norm(GridFunction(grid, centered ** m), q)
        bottom = luxemburg_norm(indicator(grid, selected), q)
        out[i] = top / bottom
    return out


def oscillation_growth(b: GridFunction, q: ExponentFunction, m: int, bmo: float) -> List[Tuple[int, int, float]]:
    """(i, j, ratio) with ratio = ||(b - b_{B_i})^m chi_{B_j}|| / ((j-i)^m ||b||^m ||chi_{B_j}||)."""
    grid = b.grid
    if bmo <= 0.0:
        raise ArgumentError("growth ratios need a positive BMO norm, got {}".format(bmo))
    chi_norms = ball_norms(q, grid)
    means = {i: mean_on_set(b, grid.ball_mask(i)) for i in grid.shells if grid.measure(grid.ball_mask(i)) > 0}
    rows = []
    for j in grid.shells:
        if chi_norms[j] == 0.0:
            continue
        ball_j = grid.ball_mask(j)
        for i in grid.shells:
            if i >= j or i not in means:
                continue
            centered = np.where(ball_j, b.values - means[i], 0.0)
            top = luxemburg_norm(GridFunction(grid, centered ** m), q)
            rows.append((i, j, top / ((j - i) ** m * bmo ** m * chi_norms[j])))
    return rows
