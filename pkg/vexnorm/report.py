import json
import math
from pathlib import Path
from typing import Any, List

import numpy as np
import pandas as pd
from jinja2 import Environment, FileSystemLoader, select_autoescape

from vexnorm.checks import CheckResult
from vexnorm.data_contract import CheckSummary, GridInfo, RunSummary, SweepRow, SweepSummary


SCHEMA_VERSION = 1

TEMPLATES_DIR = Path(__file__).parent / "templates"
env = Environment(
    loader=FileSystemLoader(str(TEMPLATES_DIR)),
    autoescape=select_autoescape(["html", "xml"]),
)


def find_output_dir(base: str = ".") -> Path:
    """First ./vexnorm_run_<i> that does not exist yet."""
    i = 1
    d = Path(base) / "vexnorm_run_{}".format(i)
    while d.exists():
        i += 1
        d = Path(base) / "vexnorm_run_{}".format(i)
    return d


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_csv(frame: pd.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")


def write_json(data: Any, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=False)
        fh.write("\n")


def write_run(out_dir: Path, config_path: str, name: str, grid: GridInfo, parameters: dict,
              results: List[CheckResult], html: bool = True) -> RunSummary:
    out_dir.mkdir(parents=True, exist_ok=True)
    checks: List[CheckSummary] = []
    for result in results:
        csv_name = "{}.csv".format(result.name)
        write_csv(result.table, out_dir / csv_name)
        checks.append(CheckSummary(name=result.name, passed=result.passed, csv=csv_name,
                                   summary=result.summary, failures=result.failures))

    notes = [] if results else ["no checks requested"]
    summary = RunSummary(schema_version=SCHEMA_VERSION, config=str(config_path), name=name, grid=grid,
                         parameters=parameters, checks=checks,
                         passed=all(c["passed"] for c in checks), notes=notes)
    write_json(summary, out_dir / "summary.json")
    if html:
        (out_dir / "summary.html").write_text(render_summary(summary), encoding="utf-8")
    return summary


def write_sweep(out_dir: Path, config_path: str, parameter: str, values: List[float],
                rows: List[SweepRow]) -> SweepSummary:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_name = "sweep_{}.csv".format(parameter)
    write_csv(pd.DataFrame(rows), out_dir / csv_name)
    summary = SweepSummary(schema_version=SCHEMA_VERSION, config=str(config_path), parameter=parameter,
                           values=list(values), csv=csv_name, rows=rows)
    write_json(summary, out_dir / "sweep.json")
    return summary


def render_summary(summary: RunSummary) -> str:
    template = env.get_template("summary.html")
    return template.render(
        name=summary["name"],
        config=summary["config"],
        grid=summary["grid"],
        parameters=_jsonable(summary["parameters"]),
        checks=_jsonable(summary["checks"]),
        passed=summary["passed"],
        notes=summary["notes"],
    )
