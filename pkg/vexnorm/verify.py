"""Empirical verification harness.

Operator bounds are estimated as sup ratios over a test family, then
re-estimated on the refined grid (L + 1) and on the widened grid
(k_max + 1, same spacing).  A bound counts as verified when the sup is
finite and both relative changes stay under the caller's thresholds.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np

from vexnorm import settings
from vexnorm.errors import ArgumentError, ConfigurationError, DataError
from vexnorm.exponents import ExponentFunction, conjugate, sobolev_partner
from vexnorm.families import Symbol, TestFunction, check_bmo_symbol
from vexnorm.grid import DyadicGrid, GridFunction, restrict_to_shell
from vexnorm.norms import (
    BallFamily,
    HerzMorreyParams,
    bmo_norm,
    build_ball_family,
    duality_products,
    herz_morrey_from_shell_norms,
    herz_morrey_norm,
    herz_norm,
    luxemburg_norm,
    nested_ball_ratios,
    oscillation_growth,
    oscillation_ratios,
)
from vexnorm.operators import FracIntegralSpec, commutator, kernel_bound_constants


logger = logging.getLogger(__name__)

Operator = Callable[[GridFunction], GridFunction]
Norm = Callable[[GridFunction], float]
Member = Union[TestFunction, GridFunction]

SAFETY_MARGIN = 0.9


@dataclass
class DeltaEstimate:
    delta: float
    C: float
    pairs: int
    C_pairs: float = math.nan

    def as_dict(self):
        return {"delta": self.delta, "C": self.C, "C_pairs": self.C_pairs, "pairs": self.pairs}


def estimate_delta(q: ExponentFunction, grid: DyadicGrid) -> DeltaEstimate:
    """Slope of ln(||chi_S|| / ||chi_B||) against ln(|S| / |B|) over nested origin balls.

    C is exp(intercept) of the fit.  C_pairs is the smallest constant with
    norm ratio <= C_pairs * (measure ratio)^delta on every pair used by the fit.
    """
    measure_ratio, norm_ratio = nested_ball_ratios(q, grid)
    usable = (measure_ratio > 0.0) & (measure_ratio < 1.0) & (norm_ratio > 0.0)
    if np.count_nonzero(usable) < 3:
        raise ConfigurationError("only {} nested ball pairs on {}, need at least 3".format(
            int(np.count_nonzero(usable)), grid))
    x = np.log(measure_ratio[usable])
    y = np.log(norm_ratio[usable])
    slope, intercept = np.polyfit(x, y, 1)
    c_pairs = float(np.max(norm_ratio[usable] / measure_ratio[usable] ** slope))
    return DeltaEstimate(delta=float(slope), C=float(np.exp(intercept)), pairs=int(np.count_nonzero(usable)),
                         C_pairs=c_pairs)


@dataclass
class RatioRow:
    id: str
    source_norm: float
    target_norm: float
    ratio: float


@dataclass
class RatioReport:
    sup_ratio: float
    witness: str
    rows: List[RatioRow]
    refinement_delta: float
    shell_delta: float
    grid: Dict[str, float] = field(default_factory=dict)
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def ratios(self) -> List[float]:
        return [row.ratio for row in self.rows]

    @property
    def finite(self) -> bool:
        return math.isfinite(self.sup_ratio)

    def stable(self, refinement: float, shell: Optional[float] = None) -> bool:
        if not (self.finite and self.refinement_delta < refinement):
            return False
        return shell is None or self.shell_delta < shell

    def as_dict(self):
        return {
            "sup_ratio": self.sup_ratio,
            "witness": self.witness,
            "refinement_delta": self.refinement_delta,
            "shell_delta": self.shell_delta,
            "members": len(self.rows),
        }


def _member_name(member: Member, index: int) -> str:
    return member.name if isinstance(member, TestFunction) else "f{}".format(index)


def _evaluate(member: Member, index: int, grid: DyadicGrid, operator: Operator,
              source_norm: Norm, target_norm: Norm) -> RatioRow:
    name = _member_name(member, index)
    f = member.on(grid) if isinstance(member, TestFunction) else member
    source = source_norm(f)
    if not source > 0.0:
        raise DataError("test function '{}' has zero source norm".format(name))
    target = target_norm(operator(f))
    return RatioRow(id=name, source_norm=source, target_norm=target, ratio=target / source)


def _rows(family: Sequence[Member], grid: DyadicGrid, operator: Operator, source_norm: Norm,
          target_norm: Norm, threads: int) -> List[RatioRow]:
    def work(item):
        index, member = item
        return _evaluate(member, index, grid, operator, source_norm, target_norm)

    if threads <= 1:
        return [work(item) for item in enumerate(family)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, enumerate(family)))


def _relative_change(new: float, old: float) -> float:
    if old == 0.0:
        return abs(new - old)
    return abs(new - old) / abs(old)


def run_ratio_experiment(operator: Operator, source_norm: Norm, target_norm: Norm,
                         family: Sequence[Member], grid: Optional[DyadicGrid] = None,
                         stability: bool = True, threads: Optional[int] = None) -> RatioReport:
    """sup over the family of target_norm(operator f) / source_norm(f)."""
    if len(family) == 0:
        raise ArgumentError("ratio experiment needs a nonempty family")
    if grid is None:
        first = family[0]
        if not isinstance(first, GridFunction):
            raise ArgumentError("a family of profiles needs an explicit grid")
        grid = first.grid
    threads = settings.threads if threads is None else max(1, threads)

    rows = _rows(family, grid, operator, source_norm, target_norm, threads)
    ratios = np.array([row.ratio for row in rows])
    best = int(np.argmax(ratios))
    sup = float(ratios[best])

    refinement_delta = shell_delta = math.nan
    if stability and all(isinstance(member, TestFunction) for member in family):
        refined = _rows(family, grid.refined(), operator, source_norm, target_norm, threads)
        refinement_delta = _relative_change(max(row.ratio for row in refined), sup)
        widened = _rows(family, grid.widened(), operator, source_norm, target_norm, threads)
        shell_delta = _relative_change(max(row.ratio for row in widened), sup)
    elif stability:
        logger.info("family holds grid samples only, skipping refinement and shell stability")

    logger.debug("sup ratio {:.6g} at {} (refinement {:.3g}, shell {:.3g})".format(
        sup, rows[best].id, refinement_delta, shell_delta))
    return RatioReport(sup_ratio=sup, witness=rows[best].id, rows=rows,
                       refinement_delta=refinement_delta, shell_delta=shell_delta,
                       grid=grid.describe())


@dataclass(frozen=True)
class TheoremParams:
    q1: ExponentFunction
    beta: float
    alpha: float
    lam: float
    p1: float = 1.0
    p2: float = 1.0
    m: int = 0
    symbol: Symbol = Symbol("log")
    engine: str = "fft"
    delta1: Optional[float] = None
    delta2: Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.p1 <= self.p2):
            raise ArgumentError("need 0 < p1 <= p2, got p1={} p2={}".format(self.p1, self.p2))
        if self.lam < 0.0:
            raise ArgumentError("lambda must be >= 0, got {}".format(self.lam))
        if self.m < 0:
            raise ArgumentError("commutator order must be >= 0, got {}".format(self.m))

    def q2(self, n: int) -> ExponentFunction:
        return sobolev_partner(self.q1, self.beta, n)

    def source(self) -> HerzMorreyParams:
        return HerzMorreyParams(self.alpha, self.lam, self.p1, self.q1)

    def target(self, n: int) -> HerzMorreyParams:
        return HerzMorreyParams(self.alpha, self.lam, self.p2, self.q2(n))

    def spec_on(self, grid: DyadicGrid) -> FracIntegralSpec:
        b = self.symbol.sample(grid) if self.m else None
        return FracIntegralSpec(beta=self.beta, m=self.m, b=b, engine=self.engine)

    def operator(self) -> Operator:
        def apply(f: GridFunction) -> GridFunction:
            return commutator(f, self.spec_on(f.grid))
        return apply

    def with_deltas(self, grid: DyadicGrid) -> "TheoremParams":
        """Fill delta1 (on q1') and delta2 (on q2) from nested-ball regressions."""
        d1 = estimate_delta(conjugate(self.q1), grid).delta
        d2 = estimate_delta(self.q2(grid.n), grid).delta
        return replace(self, delta1=d1, delta2=d2)

    def describe(self) -> Dict[str, object]:
        return {"q1": repr(self.q1), "beta": self.beta, "alpha": self.alpha, "lambda": self.lam,
                "p1": self.p1, "p2": self.p2, "m": self.m, "symbol": self.symbol.describe(),
                "engine": self.engine}


@dataclass(frozen=True)
class AlphaWindow:
    name: str
    delta1: float
    delta2: float
    lower: float
    upper: float

    def contains(self, alpha: float) -> bool:
        return self.lower < alpha < self.upper

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def as_dict(self):
        return {"delta1": self.delta1, "delta2": self.delta2, "lower": self.lower, "upper": self.upper}


def admissible_windows(params: TheoremParams, grid: DyadicGrid,
                       margin: float = SAFETY_MARGIN) -> Dict[str, AlphaWindow]:
    """lam - n*delta2 < alpha < lam + n*delta1 under both published caps on delta1, delta2.

    "theorem" caps delta1 by 1/(q1')_+ and delta2 by 1/(q2)_+, "preamble" caps
    delta1 by 1/(q2')_+ and delta2 by 1/(q1)_+.  Estimates are shrunk by ``margin``.
    """
    if params.delta1 is None or params.delta2 is None:
        params = params.with_deltas(grid)
    n = grid.n
    q1, q2 = params.q1, params.q2(n)
    # the caps use sup over all of R^n, not the grid box
    caps = {
        "theorem": (1.0 / conjugate(q1).bounds()[1], 1.0 / q2.bounds()[1]),
        "preamble": (1.0 / conjugate(q2).bounds()[1], 1.0 / q1.bounds()[1]),
    }
    out = {}
    for name, (cap1, cap2) in caps.items():
        d1 = margin * min(params.delta1, cap1)
        d2 = margin * min(params.delta2, cap2)
        out[name] = AlphaWindow(name=name, delta1=d1, delta2=d2,
                                lower=params.lam - n * d2, upper=params.lam + n * d1)
    return out


def check_theorem(params: TheoremParams, family: Sequence[Member], grid: DyadicGrid,
                  enforce_window: bool = True, stability: bool = True,
                  threads: Optional[int] = None) -> RatioReport:
    """Sup of ||I^m_{beta,b} f||_{MK(alpha,lam,p2,q2)} / ||f||_{MK(alpha,lam,p1,q1)}."""
    windows = admissible_windows(params, grid)
    active = windows["theorem"]
    if enforce_window and not active.contains(params.alpha):
        raise ArgumentError("alpha={} outside the admissible window ({:.6g}, {:.6g})".format(
            params.alpha, active.lower, active.upper))

    bmo = check_bmo_symbol(params.symbol, grid) if params.m else 1.0
    source, target = params.source(), params.target(grid.n)
    report = run_ratio_experiment(
        params.operator(),
        lambda f: herz_morrey_norm(f, source),
        lambda g: herz_morrey_norm(g, target),
        family, grid=grid, stability=stability, threads=threads)
    report.extra.update({
        "bmo_factor": bmo ** params.m,
        "windows": {name: w.as_dict() for name, w in windows.items()},
        "alpha_inside": {name: w.contains(params.alpha) for name, w in windows.items()},
    })
    return report


def herz_hls_check(q1: ExponentFunction, beta: float, alpha: float, p: float,
                   family: Sequence[Member], grid: DyadicGrid, engine: str = "fft",
                   stability: bool = True, threads: Optional[int] = None) -> RatioReport:
    """I_beta from the Herz space K^{alpha,p}_{q1} to K^{alpha,p}_{q2}."""
    q2 = sobolev_partner(q1, beta, grid.n)
    spec = FracIntegralSpec(beta=beta, engine=engine)
    return run_ratio_experiment(
        lambda f: commutator(f, spec),
        lambda f: herz_norm(f, q1, alpha, p),
        lambda g: herz_norm(g, q2, alpha, p),
        family, grid=grid, stability=stability, threads=threads)


@dataclass
class E123Report:
    e1: float
    e2: float
    e3: float
    total: float
    total_p1: float
    factor: float
    normalizer: float
    per_shell: List[Dict[str, float]] = field(default_factory=list)

    @property
    def bound(self) -> float:
        return self.factor * (self.e1 + self.e2 + self.e3)

    @property
    def holds(self) -> bool:
        return self.total <= self.bound * (1.0 + 1e-9)

    def normalized(self) -> Tuple[float, float, float]:
        if self.normalizer == 0.0:
            return 0.0, 0.0, 0.0
        return self.e1 / self.normalizer, self.e2 / self.normalizer, self.e3 / self.normalizer

    def as_dict(self):
        return {"E1": self.e1, "E2": self.e2, "E3": self.e3, "total": self.total,
                "total_p1": self.total_p1, "bound": self.bound, "normalizer": self.normalizer}


def decompose_E123(f: GridFunction, params: TheoremParams) -> E123Report:
    """Split I^m_{beta,b} f by source shell j against target shell k.

    E1 collects j <= k-2, E2 collects k-1 <= j <= k+1, E3 collects j >= k+2.
    Each E_i is the p1-th power of the Herz-Morrey expression (exponent p1)
    built from the summed shell norms.  total is the p1-th power of the
    image norm in the target space, with p2 inside; total_p1 is the same
    shell sequence summed with p1, which never falls below total when p1 <= p2.
    """
    grid = f.grid
    shells = list(grid.shells)
    n_shells = len(shells)
    q2 = params.q2(grid.n)
    spec = params.spec_on(grid)

    norms = np.zeros((n_shells, n_shells))
    for jj, j in enumerate(shells):
        piece = restrict_to_shell(f, j)
        if piece.is_zero():
            continue
        image = commutator(piece, spec)
        for kk, k in enumerate(shells):
            norms[kk, jj] = luxemburg_norm(restrict_to_shell(image, k), q2)

    offset = np.arange(n_shells)[None, :] - np.arange(n_shells)[:, None]
    far_below = np.where(offset <= -2, norms, 0.0).sum(axis=1)
    near = np.where(np.abs(offset) <= 1, norms, 0.0).sum(axis=1)
    far_above = np.where(offset >= 2, norms, 0.0).sum(axis=1)

    def assemble(a):
        _, _, value = herz_morrey_from_shell_norms(np.array(shells), a, params.alpha, params.lam, params.p1)
        return value ** params.p1

    image = commutator(f, spec)
    actual = np.array([luxemburg_norm(restrict_to_shell(image, k), q2) for k in shells])
    _, _, total = herz_morrey_from_shell_norms(np.array(shells), actual, params.alpha, params.lam, params.p2)
    _, _, total_p1 = herz_morrey_from_shell_norms(np.array(shells), actual, params.alpha, params.lam, params.p1)

    bmo = bmo_norm(spec.b, build_ball_family(grid)) if params.m else 1.0
    normalizer = bmo ** (params.m * params.p1) * herz_morrey_norm(f, params.source()) ** params.p1

    per_shell = [{"k": k, "far_below": float(far_below[i]), "near": float(near[i]),
                  "far_above": float(far_above[i]), "actual": float(actual[i])}
                 for i, k in enumerate(shells)]
    return E123Report(e1=assemble(far_below), e2=assemble(near), e3=assemble(far_above),
                      total=total ** params.p1, total_p1=total_p1 ** params.p1, factor=3.0 ** max(params.p1, 1.0),
                      normalizer=normalizer, per_shell=per_shell)


def embedding_inequality(seq: Sequence[float], p1: float, p2: float) -> Tuple[float, float]:
    """(sum |a_i|)^(p1/p2) and sum |a_i|^(p1/p2); the first never exceeds the second."""
    if not (0.0 < p1 <= p2):
        raise ArgumentError("need 0 < p1 <= p2, got p1={} p2={}".format(p1, p2))
    a = np.abs(np.asarray(seq, dtype=np.float64))
    r = p1 / p2
    return float(np.sum(a)) ** r, float(np.sum(a ** r))


@dataclass
class DualityReport:
    products: Dict[int, float]
    refined: Dict[int, float]

    @property
    def lower(self) -> float:
        return min(self.products.values())

    @property
    def upper(self) -> float:
        return max(self.products.values())

    @property
    def max_change(self) -> float:
        return max(_relative_change(self.refined[k], v) for k, v in self.products.items())


def duality_report(q: ExponentFunction, grid: DyadicGrid) -> DualityReport:
    return DualityReport(products=duality_products(q, grid), refined=duality_products(q, grid.refined()))


@dataclass
class OscillationReport:
    m: int
    bmo: float
    sup_ratio: float
    growth: List[Tuple[int, int, float]]

    @property
    def constant(self) -> float:
        """Smallest C with C^-1 ||b||^m <= sup ratio <= C ||b||^m."""
        scale = self.bmo ** self.m
        return max(self.sup_ratio / scale, scale / self.sup_ratio)

    @property
    def growth_constant(self) -> float:
        return max((ratio for _, _, ratio in self.growth), default=0.0)


def oscillation_report(symbol: Symbol, q: ExponentFunction, grid: DyadicGrid, m: int,
                       balls: Optional[BallFamily] = None) -> OscillationReport:
    """Both oscillation estimates for the symbol over a ball family."""
    if m < 1:
        raise ArgumentError("oscillation estimates need m >= 1, got {}".format(m))
    balls = build_ball_family(grid) if balls is None else balls
    b = symbol.sample(grid)
    bmo = bmo_norm(b, balls)
    if bmo == 0.0:
        raise DataError("symbol {} has zero mean oscillation on {}".format(symbol, grid))
    ratios = oscillation_ratios(b, q, balls, m)
    return OscillationReport(m=m, bmo=bmo, sup_ratio=float(np.nanmax(ratios)),
                             growth=oscillation_growth(b, q, m, bmo))


def lemma_report(q: ExponentFunction, grid: DyadicGrid, symbol: Symbol = Symbol("log"),
                 orders: Sequence[int] = (1, 2)) -> Dict[str, object]:
    """Nested-ball delta, duality products and oscillation constants for one exponent."""
    delta = estimate_delta(q, grid)
    refined_delta = estimate_delta(q, grid.refined())
    duality = duality_report(q, grid)
    oscillation = {m: oscillation_report(symbol, q, grid, m) for m in orders}
    return {
        "delta": delta.as_dict(),
        "delta_refinement_change": _relative_change(refined_delta.delta, delta.delta),
        "duality_range": (duality.lower, duality.upper),
        "duality_change": duality.max_change,
        "oscillation_constant": {m: r.constant for m, r in oscillation.items()},
        "growth_constant": {m: r.growth_constant for m, r in oscillation.items()},
    }


def kernel_inequality_report(grid: DyadicGrid, betas: Sequence[float],
                             engine: str = "fft") -> Dict[float, Dict[int, float]]:
    """Per beta, the minimal C_k with chi_{B_k} <= C_k 2^{-k beta} I_beta(chi_{B_k})."""
    return {beta: kernel_bound_constants(grid, beta, engine) for beta in betas}
