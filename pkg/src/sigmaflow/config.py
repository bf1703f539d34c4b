"""Run configuration: a fixed JSON schema validated up front.

Unknown keys are rejected and all positivity constraints are checked; a bad
file reports every violation at once, not just the first.
"""

import json
from pathlib import Path
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import SigmaflowError
from .geometry.background import (BackgroundGeometry, constant_map,
                                  identity_map, linear_map)


class ConfigError(SigmaflowError):
    def __init__(self, problems):
        super().__init__("invalid configuration: " + "; ".join(problems))
        self.problems = list(problems)


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PsiConfig(_Model):
    kind: Literal["identity", "constant", "linear"] = "identity"
    value: Optional[List[float]] = None          # constant: image point
    matrix: Optional[List[List[float]]] = None   # linear: D x 2
    offset: Optional[List[float]] = None

    def build(self, dim_target):
        if self.kind == "identity":
            return identity_map(dim_target)
        if self.kind == "constant":
            value = self.value if self.value is not None else [0.0] * dim_target
            return constant_map(value)
        matrix = self.matrix if self.matrix is not None else np.eye(dim_target, 2).tolist()
        return linear_map(matrix, self.offset)


class BackgroundConfig(_Model):
    sigma_family: str = "torus"
    m_family: str = "flat:2"
    psi: PsiConfig = PsiConfig()

    def build(self) -> BackgroundGeometry:
        from .geometry.charts import family
        m = family(self.m_family)
        return BackgroundGeometry(self.sigma_family, self.m_family,
                                  self.psi.build(m.chart.dim))


class DiscretizationConfig(_Model):
    quadrature_points: int = Field(default=4, gt=0)
    geodesic_samples: int = Field(default=33, ge=9)
    stencil_h: float = Field(default=0.04, gt=0)


class FlowConfig(_Model):
    nu: float = Field(default=1.0, gt=0)
    tau_end: float = Field(default=0.3, gt=0)
    dt: float = Field(default=1e-3, gt=0)
    family: Optional[str] = None      # defaults to the background target family
    grid_n: int = Field(default=8, gt=3)
    record_every: int = Field(default=10, gt=0)


class HadamardConfig(_Model):
    order: int = Field(default=1, ge=0)
    lambdas: List[float] = Field(default=[0.5, 2.0])
    ell_H: float = Field(default=1.0, gt=0)
    x0: Optional[List[float]] = None
    x1: Optional[List[float]] = None


class WickConfig(_Model):
    k_max: int = Field(default=6, ge=1)
    cases: int = Field(default=40, gt=0)


class RenormConfig(_Model):
    lambdas: List[float] = Field(default=[0.5, 2.0, float(np.e)])
    nu: float = Field(default=0.1, gt=0)


class RunConfig(_Model):
    background: BackgroundConfig = BackgroundConfig()
    discretization: DiscretizationConfig = DiscretizationConfig()
    flow: FlowConfig = FlowConfig()
    hadamard: HadamardConfig = HadamardConfig()
    wick: WickConfig = WickConfig()
    renorm: RenormConfig = RenormConfig()
    seed: int = Field(default=0, ge=0)

    def canonical_json(self):
        return json.dumps(self.model_dump(), sort_keys=True, separators=(",", ":"))


def _positivity_problems(cfg: RunConfig):
    problems = []
    for lam in cfg.hadamard.lambdas:
        if lam <= 0:
            problems.append(f"hadamard.lambdas entries must be positive (got {lam})")
    for lam in cfg.renorm.lambdas:
        if lam <= 0:
            problems.append(f"renorm.lambdas entries must be positive (got {lam})")
    return problems


def config_from_dict(data) -> RunConfig:
    try:
        cfg = RunConfig.model_validate(data)
    except ValidationError as exc:
        problems = []
        for err in exc.errors():
            loc = ".".join(str(part) for part in err["loc"])
            problems.append(f"{loc}: {err['msg']}")
        raise ConfigError(problems) from None
    problems = _positivity_problems(cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def parse_config(path) -> RunConfig:
    """Load and validate a JSON config file, reporting all problems at once."""
    path = Path(path)
    if not path.exists():
        raise ConfigError([f"config file not found: {path}"])
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([f"not valid JSON: {exc}"]) from None
    return config_from_dict(data)
