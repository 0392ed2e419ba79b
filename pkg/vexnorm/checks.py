"""Named checks run by the CLI; each returns a table and a pass/fail verdict."""
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Dict, List
import logging
import math

import numpy as np
import pandas as pd

from vexnorm.config import ExperimentConfig
from vexnorm.data_contract import SweepRow
from vexnorm.exponents import Constant, GaussBump, LogDecay, check_log_holder, conjugate, from_spec
from vexnorm.families import family_profiles, mixed_profiles
from vexnorm.grid import build_grid
from vexnorm.norms import holder_pair, luxemburg_norm
from vexnorm.operators import FracIntegralSpec, commutator
from vexnorm.verify import (
    TheoremParams,
    admissible_windows,
    check_theorem,
    decompose_E123,
    duality_report,
    estimate_delta,
    kernel_inequality_report,
    oscillation_report,
    run_ratio_experiment,
)


logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    table: pd.DataFrame
    summary: Dict[str, object] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)


class Experiment:
    """Objects built once from a config and shared by the checks."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        g = config.grid
        self.grid = build_grid(g.n, g.k_min, g.k_max, g.level)
        self.q1 = from_spec(config.exponent.q1)
        self.symbol = config.symbol()

    @cached_property
    def family(self):
        f = self.config.family
        return mixed_profiles(f.kinds, self.grid, f.seed, f.size, self.q1)

    @cached_property
    def theorem_params(self) -> TheoremParams:
        op, space = self.config.operator, self.config.space
        params = TheoremParams(q1=self.q1, beta=op.beta, alpha=0.0, lam=space.lam, p1=space.p1,
                               p2=space.p2, m=op.m, symbol=self.symbol, engine=op.engine)
        params = params.with_deltas(self.grid)
        if space.alpha is None:
            alpha = admissible_windows(params, self.grid)["theorem"].midpoint
            logger.info("alpha not given, using the window midpoint {:.6g}".format(alpha))
        else:
            alpha = space.alpha
        return replace(params, alpha=alpha)

    @property
    def q2(self):
        return self.theorem_params.q2(self.grid.n)

    def tag(self, frame: pd.DataFrame, grid=None) -> pd.DataFrame:
        """Stamp every row with the grid it was computed on."""
        info = (grid or self.grid).describe()
        for key in ("n", "k_min", "k_max", "level"):
            frame[key] = info[key]
        return frame


def _random_exponent(rng: np.random.Generator, i: int):
    kind = i % 3
    if kind == 0:
        return Constant(rng.uniform(1.1, 6.0))
    if kind == 1:
        return LogDecay(rng.uniform(1.2, 3.0), rng.uniform(0.0, 2.0))
    return GaussBump(rng.uniform(1.2, 3.0), rng.uniform(-0.1, 1.5), rng.uniform(0.5, 4.0))


def check_holder(exp: Experiment) -> CheckResult:
    cfg = exp.config
    rng = np.random.default_rng(cfg.checks.seed)
    slack = cfg.thresholds.holder_slack
    rows = []
    for trial in range(cfg.checks.holder_trials):
        q = _random_exponent(rng, trial)
        f, g = (m.on(exp.grid) for m in family_profiles("random_piecewise", exp.grid,
                                                         int(rng.integers(2 ** 31)), size=2))
        pair = holder_pair(f, g, q)
        rows.append({"trial": trial, "exponent": repr(q), "lhs": pair.lhs, "rhs": pair.rhs, "slack": pair.slack})
    table = exp.tag(pd.DataFrame(rows))
    bad = table[table["lhs"] > table["rhs"] + slack]
    failures = ["trial {}: lhs={:.6g} > rhs={:.6g}".format(r.trial, r.lhs, r.rhs) for r in bad.itertuples()]
    return CheckResult("holder", not failures, table,
                       {"trials": len(table), "violations": len(failures), "min_slack": float(table["slack"].min())},
                       failures)


def check_logholder(exp: Experiment) -> CheckResult:
    rows, failures = [], []
    for label, q in (("q1", exp.q1), ("q1_conjugate", conjugate(exp.q1)), ("q2", exp.q2)):
        report = check_log_holder(q, exp.grid, seed=exp.config.checks.seed)
        box = q.bound_to(exp.grid)
        rows.append({"exponent": label, "q_minus": box.q_minus, "q_plus": box.q_plus,
                     "C_local": report.c_local, "C_infinity": report.c_infinity})
        if not report.certified:
            failures.append("{}: log-Hölder constants not finite ({})".format(label, report.as_dict()))
    return CheckResult("logholder", not failures, exp.tag(pd.DataFrame(rows)), {"exponents": len(rows)}, failures)


def check_lemma2(exp: Experiment) -> CheckResult:
    limit = exp.config.thresholds.delta_refinement
    refined = exp.grid.refined()
    rows, failures = [], []
    for label, q in (("q1", exp.q1), ("q1_conjugate", conjugate(exp.q1)), ("q2", exp.q2)):
        base, fine = estimate_delta(q, exp.grid), estimate_delta(q, refined)
        change = abs(fine.delta - base.delta) / base.delta
        rows.append({"exponent": label, "delta": base.delta, "C": base.C, "C_pairs": base.C_pairs, "pairs": base.pairs,
                     "delta_refined": fine.delta, "change": change})
        if not 0.0 < base.delta <= 1.0:
            failures.append("{}: delta={:.6g} outside (0, 1]".format(label, base.delta))
        if change >= limit:
            failures.append("{}: delta moves by {:.3g} under refinement".format(label, change))
    return CheckResult("lemma2", not failures, exp.tag(pd.DataFrame(rows)), {"exponents": len(rows)}, failures)


def check_lemma3(exp: Experiment) -> CheckResult:
    lo, hi = exp.config.thresholds.duality_range
    limit = exp.config.thresholds.duality_refinement
    rows, failures = [], []
    for label, q in (("q1", exp.q1), ("q2", exp.q2)):
        report = duality_report(q, exp.grid)
        for k, value in report.products.items():
            change = abs(report.refined[k] - value) / value
            rows.append({"exponent": label, "k": k, "product": value,
                         "product_refined": report.refined[k], "change": change})
            if not lo <= value <= hi:
                failures.append("{} k={}: product {:.6g} outside [{}, {}]".format(label, k, value, lo, hi))
            if change >= limit:
                failures.append("{} k={}: product moves by {:.3g} under refinement".format(label, k, change))
    return CheckResult("lemma3", not failures, exp.tag(pd.DataFrame(rows)), {"balls": len(rows)}, failures)


def check_lemma4(exp: Experiment) -> CheckResult:
    limit = exp.config.thresholds.lemma_constant
    rows, failures, summary = [], [], {}
    for m in exp.config.checks.orders:
        report = oscillation_report(exp.symbol, exp.q1, exp.grid, m)
        for i, j, ratio in report.growth:
            rows.append({"m": m, "i": i, "j": j, "growth_ratio": ratio})
        summary["m{}".format(m)] = {"bmo": report.bmo, "sup_ratio": report.sup_ratio,
                                    "constant": report.constant, "growth_constant": report.growth_constant}
        if report.constant > limit:
            failures.append("m={}: oscillation constant {:.4g} > {}".format(m, report.constant, limit))
        if report.growth_constant > limit:
            failures.append("m={}: growth constant {:.4g} > {}".format(m, report.growth_constant, limit))
    return CheckResult("lemma4", not failures, exp.tag(pd.DataFrame(rows, columns=["m", "i", "j", "growth_ratio"])),
                       summary, failures)


def _report_table(exp: Experiment, report) -> pd.DataFrame:
    frame = pd.DataFrame([vars(row) for row in report.rows], columns=["id", "source_norm", "target_norm", "ratio"])
    return exp.tag(frame)


def check_hls(exp: Experiment) -> CheckResult:
    op = exp.config.operator
    q1, q2 = exp.q1, exp.q2
    spec = FracIntegralSpec(beta=op.beta, engine=op.engine)
    report = run_ratio_experiment(lambda f: commutator(f, spec),
                                  lambda f: luxemburg_norm(f, q1),
                                  lambda g: luxemburg_norm(g, q2),
                                  exp.family, grid=exp.grid)
    limit = exp.config.thresholds.hls_refinement
    failures = []
    if not report.stable(limit):
        failures.append("sup ratio {:.6g}, refinement change {:.3g} (limit {})".format(
            report.sup_ratio, report.refinement_delta, limit))
    return CheckResult("hls", not failures, _report_table(exp, report), report.as_dict(), failures)


def check_theorem_bound(exp: Experiment) -> CheckResult:
    t = exp.config.thresholds
    params = exp.theorem_params
    report = check_theorem(params, exp.family, exp.grid)
    failures = []
    if not report.stable(t.theorem_refinement, t.theorem_shell):
        failures.append("sup ratio {:.6g}, refinement change {:.3g}, shell change {:.3g}".format(
            report.sup_ratio, report.refinement_delta, report.shell_delta))

    scaled = check_theorem(replace(params, symbol=params.symbol.scaled(3.0)), exp.family, exp.grid,
                           stability=False)
    expected = 3.0 ** params.m
    worst = 0.0
    for base, tripled in zip(report.rows, scaled.rows):
        if base.ratio == 0.0:
            worst = max(worst, abs(tripled.ratio))
        else:
            worst = max(worst, abs(tripled.ratio / base.ratio - expected) / expected)
    if worst > t.scaling_tolerance:
        failures.append("b -> 3b changes ratios by factor off 3^{} by {:.3g}".format(params.m, worst))

    table = _report_table(exp, report)
    table["ratio_3b"] = [row.ratio for row in scaled.rows]
    summary = dict(report.as_dict(), alpha=params.alpha, scaling_error=worst, **report.extra)
    return CheckResult("theorem", not failures, table, summary, failures)


def check_e123(exp: Experiment) -> CheckResult:
    params = exp.theorem_params
    limit = exp.config.thresholds.e123_refinement
    members = exp.family[:exp.config.checks.e123_members]
    refined = exp.grid.refined()
    rows, failures = [], []
    peaks = np.zeros((2, 3))
    for member in members:
        base = decompose_E123(member.on(exp.grid), params)
        fine = decompose_E123(member.on(refined), params)
        if not base.holds:
            failures.append("{}: total {:.6g} exceeds {:.6g}".format(member.name, base.total, base.bound))
        nb, nf = base.normalized(), fine.normalized()
        peaks[0] = np.maximum(peaks[0], nb)
        peaks[1] = np.maximum(peaks[1], nf)
        rows.append(dict(base.as_dict(), id=member.name, holds=base.holds,
                         E1_normalized=nb[0], E2_normalized=nb[1], E3_normalized=nb[2],
                         E1_refined=nf[0], E2_refined=nf[1], E3_refined=nf[2]))
    changes = []
    for i in range(3):
        if peaks[0, i] > 0.0:
            change = abs(peaks[1, i] - peaks[0, i]) / peaks[0, i]
            changes.append(change)
            if change >= limit:
                failures.append("E{} bound moves by {:.3g} under refinement".format(i + 1, change))
    summary = {"members": len(rows), "normalized_peaks": peaks[0].tolist(),
               "max_change": max(changes, default=0.0)}
    return CheckResult("e123", not failures, exp.tag(pd.DataFrame(rows)), summary, failures)


def check_kernel(exp: Experiment) -> CheckResult:
    limit = exp.config.thresholds.kernel_constant
    constants = kernel_inequality_report(exp.grid, exp.config.checks.kernel_betas, exp.config.operator.engine)
    rows, failures, summary = [], [], {}
    for beta, per_shell in constants.items():
        for k, c in per_shell.items():
            rows.append({"beta": beta, "k": k, "C": c})
        worst = max(per_shell.values())
        summary["beta={}".format(beta)] = worst
        if not (math.isfinite(worst) and worst <= limit):
            failures.append("beta={}: kernel constant {:.4g} > {}".format(beta, worst, limit))
    return CheckResult("kernel", not failures, exp.tag(pd.DataFrame(rows)), summary, failures)


CHECK_FUNCTIONS: Dict[str, Callable[[Experiment], CheckResult]] = {
    "holder": check_holder,
    "logholder": check_logholder,
    "lemma2": check_lemma2,
    "lemma3": check_lemma3,
    "lemma4": check_lemma4,
    "hls": check_hls,
    "theorem": check_theorem_bound,
    "e123": check_e123,
    "kernel": check_kernel,
}


def run_checks(exp: Experiment, names: List[str]) -> List[CheckResult]:
    results = []
    for name in names:
        logger.info("running check '{}' on {}".format(name, exp.grid))
        result = CHECK_FUNCTIONS[name](exp)
        logger.info("check '{}' {}".format(name, "passed" if result.passed else "FAILED"))
        results.append(result)
    return results


def sweep_row(config: ExperimentConfig, parameter: str, value: float) -> SweepRow:
    """Commutator ratio experiment at one parameter value; the alpha window is reported, not enforced."""
    exp = Experiment(config.with_value(parameter, value))
    params = exp.theorem_params
    report = check_theorem(params, exp.family, exp.grid, enforce_window=False)
    inside = report.extra["alpha_inside"]
    info = exp.grid.describe()
    return SweepRow(parameter=parameter, value=float(value), sup_ratio=report.sup_ratio,
                    refinement_delta=report.refinement_delta, shell_delta=report.shell_delta,
                    witness=report.witness, alpha=params.alpha,
                    inside_theorem_window=inside["theorem"], inside_preamble_window=inside["preamble"],
                    n=info["n"], k_min=info["k_min"], k_max=info["k_max"], level=info["level"])
