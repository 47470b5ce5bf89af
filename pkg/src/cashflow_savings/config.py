"""Pipeline configuration: TOML file -> validated :class:`PipelineConfig`.

Example::

    input = "flows.csv"
    seed = 7
    g_fraction = 0.65
    H = 100
    risk_levels = [0.05, 0.10, 0.15]

    [variant]
    name = "Real"

    [features]
    day_of_month = true
    day_of_week = true

    [model]
    family = "rf"
    hyper = { a = 20, c = [10, 50] }     # a list is a grid searched by validation R^2

    [costs]
    scenarios = ["most_likely"]
    shortage_basis = "daily"

    [sweep]
    sigma_multipliers = [0.0, 0.5, 1.0]

Relative paths resolve against the directory holding the config file.
"""

from __future__ import annotations

import hashlib
import json
import re
import sys
from pathlib import Path
from typing import List, Literal, Optional

import numpy as np
from pydantic import (BaseModel, ConfigDict, Field, PrivateAttr, field_validator,
                      model_validator)
from pydantic import ValidationError as PydanticError

from .analysis import DEFAULT_RISK_LEVELS, DEFAULT_SIGMA_MULTIPLIERS
from .errors import ValidationError
from .models.base import Family
from .models.spec import HYPERPARAMETERS, expand_grid
from .policy import ANNUAL, DAILY, DEFAULT_SHORTAGE_BASIS, SCENARIO_GROUPS, CostStructure
from .timeseries import FeatureSpec, Variant

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

# sub-seed streams; seed for stream k is SeedSequence([master, k]).generate_state(1)[0]
SEED_STREAMS = {"variant": 0, "bootstrap": 1, "kmedoids": 2, "sweep": 3}


def derive_seed(master, stream):
    return int(np.random.SeedSequence([int(master), SEED_STREAMS[stream]]).generate_state(1)[0])


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class VariantConfig(_Section):
    name: str
    seed: Optional[int] = Field(None, ge=0)

    @field_validator("name")
    @classmethod
    def _known(cls, v):
        try:
            return Variant.parse(v).value
        except ValidationError as exc:
            raise ValueError(str(exc)) from None


class FeaturesConfig(_Section):
    day_of_month: bool = False
    day_of_week: bool = False
    month: bool = False
    week: bool = False
    lags: int = Field(0, ge=0)
    weekday_reference: int = Field(1, ge=1, le=5)
    categorical: bool = False

    def spec(self):
        return FeatureSpec(self.day_of_month, self.day_of_week, self.month, self.week,
                           self.lags, self.weekday_reference, self.categorical)


class ModelConfig(_Section):
    family: str = "mean"
    hyper: dict = Field(default_factory=dict)
    lambda_mode: Literal["per_window", "global"] = "per_window"

    @field_validator("family")
    @classmethod
    def _known(cls, v):
        try:
            return Family.parse(v).value
        except ValidationError as exc:
            raise ValueError(str(exc)) from None

    @field_validator("hyper")
    @classmethod
    def _scalars_or_lists(cls, v):
        for key, value in v.items():
            items = value if isinstance(value, list) else [value]
            if not items:
                raise ValueError(f"{key}: empty grid")
            for item in items:
                if not isinstance(item, (bool, int, float)):
                    raise ValueError(f"{key}: expected number, boolean or list, "
                                     f"got {type(item).__name__}")
        return v

    @property
    def is_grid(self):
        return any(isinstance(v, list) and len(v) > 1 for v in self.hyper.values())


class CustomCost(_Section):
    name: str
    holding: float = Field(ge=0)
    shortage: float = Field(ge=0)
    fixed_in: float = Field(0.0, ge=0)
    fixed_out: float = Field(0.0, ge=0)
    variable_in: float = Field(0.0, ge=0)
    variable_out: float = Field(0.0, ge=0)

    def structure(self):
        return CostStructure(self.name, self.holding, self.shortage, self.fixed_in,
                             self.fixed_out, self.variable_in, self.variable_out, "custom")


class CostsConfig(_Section):
    scenarios: List[Literal[SCENARIO_GROUPS]] = Field(
        default_factory=lambda: list(SCENARIO_GROUPS))
    custom: List[CustomCost] = Field(default_factory=list)
    shortage_basis: Literal[ANNUAL, DAILY] = DEFAULT_SHORTAGE_BASIS

    @model_validator(mode="after")
    def _nonempty(self):
        if not self.scenarios and not self.custom:
            raise ValueError("no cost structures selected")
        return self


class ReferenceLine(_Section):
    epsilon: float = Field(ge=0)
    label: str


class DecisionConfig(_Section):
    current_epsilon: float = Field(ge=0)
    target_epsilon: float = Field(ge=0)
    improvement_cost: float = Field(ge=0)   # money per day


class SweepConfig(_Section):
    sigma_multipliers: List[float] = Field(
        default_factory=lambda: list(DEFAULT_SIGMA_MULTIPLIERS))
    reference: List[ReferenceLine] = Field(default_factory=list)
    decision: Optional[DecisionConfig] = None

    @field_validator("sigma_multipliers")
    @classmethod
    def _sorted(cls, v):
        if not v:
            raise ValueError("sigma grid is empty")
        if any(s < 0 for s in v):
            raise ValueError("sigma multipliers must be non-negative")
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("sigma multipliers must be sorted ascending")
        return v


class PipelineConfig(_Section):
    input: Path
    dataset: Optional[str] = None
    seed: int = Field(0, ge=0)
    output_dir: Path = Path("out")
    g_fraction: float = Field(0.65, gt=0, lt=1)
    H: int = Field(100, ge=1)
    risk_levels: List[float] = Field(default_factory=lambda: list(DEFAULT_RISK_LEVELS))
    workdays_per_year: float = Field(250, gt=0)
    fold_stride: int = Field(1, ge=1)
    fixed_origin: bool = True
    variant: Optional[VariantConfig] = None
    features: FeaturesConfig = Field(default_factory=FeaturesConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    costs: CostsConfig = Field(default_factory=CostsConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    _base_dir: Path = PrivateAttr(default_factory=Path)

    @field_validator("risk_levels")
    @classmethod
    def _risks(cls, v):
        if not v:
            raise ValueError("at least one risk level is required")
        for r in v:
            if not 0 < r < 1:
                raise ValueError(f"risk level {r} is outside (0, 1)")
        return v

    @model_validator(mode="after")
    def _model_specs(self):
        # surface hyperparameter and feature errors at load time
        try:
            self.candidates()
        except ValidationError as exc:
            raise ValueError(f"model: {exc}") from None
        return self

    @property
    def input_path(self):
        return self._base_dir / self.input

    @property
    def output_path(self):
        return self._base_dir / self.output_dir

    @property
    def label(self):
        return self.dataset or self.input.stem

    def candidates(self):
        family = Family.parse(self.model.family)
        unknown = set(self.model.hyper) - set(HYPERPARAMETERS[family])
        if unknown:
            raise ValidationError(f"unknown hyperparameter(s) for {family.value}: "
                                  f"{sorted(unknown)}")
        return expand_grid(family, self.features.spec(), self.model.hyper)

    def model_spec(self):
        """The single configured spec; raises if the hyperparameters form a grid."""
        specs = self.candidates()
        if len(specs) != 1:
            raise ValidationError("model hyperparameters form a grid; run parameter search")
        return specs[0]

    def cost_structures(self):
        from .policy import cost_scenarios
        return cost_scenarios(self.costs.scenarios, [c.structure() for c in self.costs.custom])

    def sub_seed(self, stream):
        return derive_seed(self.seed, stream)

    def variant_seed(self):
        if self.variant is not None and self.variant.seed is not None:
            return self.variant.seed
        return self.sub_seed("variant")

    def fit_seed(self):
        """Seed handed to model fitting: forests bootstrap with it, RBF clusters with it."""
        family = Family.parse(self.model.family)
        return self.sub_seed("kmedoids" if family is Family.RBF else "bootstrap")

    def canonical(self):
        """Sorted compact JSON of every setting except where outputs go."""
        data = self.model_dump(mode="json", exclude={"output_dir"})
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def config_hash(self):
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()


def _format_error(exc):
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"])
        msg = err["msg"].removeprefix("Value error, ")
        if err["type"] == "extra_forbidden":
            msg = "unknown key"
        lines.append(f"{path}: {msg}" if path else msg)
    return "; ".join(lines)


def validate_config(raw, base_dir=None, overrides=None):
    """Parse TOML text (or an already-parsed mapping) into a :class:`PipelineConfig`.

    Errors are :class:`ValidationError` with one ``field.path: message`` per problem.
    """
    if isinstance(raw, str):
        try:
            data = tomllib.loads(raw)
        except tomllib.TOMLDecodeError as exc:
            raise ValidationError(f"config is not valid TOML: {exc}") from None
    else:
        data = dict(raw)
    data.update(overrides or {})
    try:
        cfg = PipelineConfig.model_validate(data)
    except PydanticError as exc:
        raise ValidationError(_format_error(exc)) from None
    if base_dir is not None:
        cfg._base_dir = Path(base_dir)
    return cfg


def load_config(path, overrides=None):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
    return validate_config(text, path.parent, overrides)


_HEADER = re.compile(r"^# seed=(\d+) config_hash=([0-9a-f]{64}) created=(\S+)")


def header_line(cfg, created):
    return f"seed={cfg.seed} config_hash={cfg.config_hash()} created={created}"


def parse_header(line):
    """``(seed, config_hash, created)`` from an output file's first line."""
    m = _HEADER.match(line.strip())
    if not m:
        raise ValidationError(f"not an output header line: {line!r}")
    return int(m.group(1)), m.group(2), m.group(3)
