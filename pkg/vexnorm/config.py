"""Experiment files: TOML parsed with tomllib, validated with pydantic."""
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from vexnorm.errors import ConfigurationError
from vexnorm.exponents import from_spec
from vexnorm.families import KINDS as FAMILY_KINDS
from vexnorm.families import Symbol


CHECKS = ("holder", "logholder", "lemma2", "lemma3", "lemma4", "hls", "theorem", "e123", "kernel")

# sweep parameter -> (block, key as written in the file)
SWEEPABLE = {
    "alpha": ("space", "alpha"),
    "lambda": ("space", "lambda"),
    "beta": ("operator", "beta"),
    "m": ("operator", "m"),
    "L": ("grid", "L"),
    "k_max": ("grid", "k_max"),
}


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class GridBlock(_Block):
    n: Literal[1, 2] = 1
    k_min: int = -4
    k_max: int = 3
    level: int = Field(8, alias="L", ge=1)

    @model_validator(mode="after")
    def _range(self):
        if not self.k_min < self.k_max:
            raise ValueError("grid.k_min={} must be < grid.k_max={}".format(self.k_min, self.k_max))
        return self


class ExponentBlock(_Block):
    q1: Dict[str, Union[str, float]] = Field(default_factory=lambda: {"family": "constant", "q0": 2.0})

    @field_validator("q1")
    @classmethod
    def _known_family(cls, value):
        from_spec(value)
        return value


class SymbolBlock(_Block):
    kind: Literal["log", "constant", "linear", "sign"] = "log"
    scale: float = 1.0


class OperatorBlock(_Block):
    beta: float = 0.25
    m: int = Field(0, ge=0)
    symbol: SymbolBlock = Field(default_factory=SymbolBlock)
    engine: Literal["direct", "fft"] = "fft"

    @field_validator("symbol", mode="before")
    @classmethod
    def _symbol_shorthand(cls, value):
        if isinstance(value, str):
            return {"kind": value}
        return value


class SpaceBlock(_Block):
    alpha: Optional[float] = None
    lam: float = Field(0.1, alias="lambda", ge=0.0)
    p1: float = Field(1.0, gt=0.0)
    p2: float = Field(1.0, gt=0.0)

    @model_validator(mode="after")
    def _order(self):
        if self.p1 > self.p2:
            raise ValueError("space.p1={} must not exceed space.p2={}".format(self.p1, self.p2))
        return self


class FamilyBlock(_Block):
    kinds: List[str] = Field(default_factory=lambda: ["shell_atoms", "gaussians", "random_piecewise"])
    size: int = Field(24, ge=1)
    seed: int = 0

    @field_validator("kinds")
    @classmethod
    def _known_kinds(cls, value):
        unknown = [kind for kind in value if kind not in FAMILY_KINDS]
        if unknown:
            raise ValueError("unknown family kinds {}, expected a subset of {}".format(unknown, FAMILY_KINDS))
        if not value:
            raise ValueError("family.kinds is empty")
        return value


class ChecksBlock(_Block):
    run: List[str] = Field(default_factory=list)
    holder_trials: int = Field(1000, ge=1)
    orders: List[int] = Field(default_factory=lambda: [1, 2])
    e123_members: int = Field(6, ge=1)
    kernel_betas: List[float] = Field(default_factory=lambda: [0.25, 0.5])
    seed: int = 0

    @field_validator("run")
    @classmethod
    def _known_checks(cls, value):
        unknown = [name for name in value if name not in CHECKS]
        if unknown:
            raise ValueError("unknown checks {}, expected a subset of {}".format(unknown, CHECKS))
        return value


class ThresholdsBlock(_Block):
    hls_refinement: float = 0.05
    theorem_refinement: float = 0.10
    theorem_shell: float = 0.10
    e123_refinement: float = 0.15
    delta_refinement: float = 0.05
    duality_range: Tuple[float, float] = (0.2, 5.0)
    duality_refinement: float = 0.10
    lemma_constant: float = 10.0
    kernel_constant: float = 10.0
    scaling_tolerance: float = 1e-10
    holder_slack: float = 1e-12


class OutputBlock(_Block):
    dir: Optional[str] = None
    html: bool = True


class ExperimentConfig(_Block):
    version: Literal[1]
    name: str = "experiment"
    grid: GridBlock = Field(default_factory=GridBlock)
    exponent: ExponentBlock = Field(default_factory=ExponentBlock)
    operator: OperatorBlock = Field(default_factory=OperatorBlock)
    space: SpaceBlock = Field(default_factory=SpaceBlock)
    family: FamilyBlock = Field(default_factory=FamilyBlock)
    checks: ChecksBlock = Field(default_factory=ChecksBlock)
    thresholds: ThresholdsBlock = Field(default_factory=ThresholdsBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)

    @model_validator(mode="after")
    def _operator_range(self):
        n = self.grid.n
        if not (0.0 < self.operator.beta < n):
            raise ValueError("operator.beta={} must lie in (0, n) = (0, {})".format(self.operator.beta, n))
        return self

    def symbol(self) -> Symbol:
        return Symbol(self.operator.symbol.kind, self.operator.symbol.scale)

    def with_value(self, parameter: str, value: Any) -> "ExperimentConfig":
        """Copy with one sweepable parameter replaced, validated again."""
        block, key = SWEEPABLE[parameter]
        raw = self.model_dump(by_alias=True)
        raw[block][key] = value
        return validate_config(raw)


def _describe(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        where = ".".join(str(part) for part in item["loc"]) or "config"
        lines.append("{}: {}".format(where, item["msg"]))
    return "invalid experiment config: " + "; ".join(lines)


def validate_config(raw: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError(_describe(e)) from e


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError("cannot parse {}: {}".format(source, e)) from e
    return validate_config(raw)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError("cannot read config '{}': {}".format(path, e)) from e
    return parse_config(text, str(path))
