from typing import Any, Dict, List, TypedDict


class GridInfo(TypedDict):
    """Grid every reported number was computed on"""
    n: int
    k_min: int
    k_max: int
    level: int
    h: float


class CheckSummary(TypedDict):
    """Outcome of one requested check"""
    name: str
    passed: bool
    csv: str
    summary: Dict[str, Any]
    failures: List[str]


class RunSummary(TypedDict):
    """JSON summary written by `vexnorm run` and `vexnorm selftest`"""
    schema_version: int
    config: str
    name: str
    grid: GridInfo
    parameters: Dict[str, Any]
    checks: List[CheckSummary]
    passed: bool
    notes: List[str]


class SweepRow(TypedDict):
    """One row of the sweep CSV"""
    parameter: str
    value: float
    sup_ratio: float
    refinement_delta: float
    shell_delta: float
    witness: str
    alpha: float
    inside_theorem_window: bool
    inside_preamble_window: bool
    n: int
    k_min: int
    k_max: int
    level: int


class SweepSummary(TypedDict):
    """JSON summary written by `vexnorm sweep`"""
    schema_version: int
    config: str
    parameter: str
    values: List[float]
    csv: str
    rows: List[SweepRow]
