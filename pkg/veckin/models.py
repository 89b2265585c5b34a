from enum import Enum
from typing import Any, Callable, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator


class SchemeKind(str, Enum):
    EC = "ec"
    ES1 = "es1"
    ES2 = "es2"
    ES2_LIMITED = "es2-limited"


class BoundaryKind(str, Enum):
    PERIODIC = "periodic"
    FIXED_FROM_INITIAL = "fixed"


class LambdaPolicy(str, Enum):
    PER_STEP = "per-step"
    FROZEN = "frozen"


class ReferenceKind(str, Enum):
    EXACT = "exact"
    SELF_CONVERGENCE = "self-convergence"
    NONE = "none"


class NormWeight(str, Enum):
    VOLUME = "volume"
    COUNT = "count"


class ModelKind(str, Enum):
    ADVECTION_1D = "advection1d"
    ROTATION_2D = "rotation2d"
    BURGERS_1D = "burgers1d"
    SHALLOW_WATER_1D = "sw1d"
    SHALLOW_WATER_2D = "sw2d"


# Run configuration
class StepConfig(BaseModel):
    cfl: float = Field(gt=0.0, le=1.0)
    scheme: SchemeKind = SchemeKind.EC
    lambda_policy: LambdaPolicy = LambdaPolicy.PER_STEP
    lambda_safety: float = Field(default=1.1, gt=1.0)
    t_end: float = Field(ge=0.0)
    boundary: BoundaryKind = BoundaryKind.PERIODIC
    # Re-project F_m onto the Maxwellian of U when lambda changes between steps
    reproject_on_lambda_change: bool = True


class CaseConfig(BaseModel):
    """A benchmark problem: model, domain, initial data and defaults."""

    name: str
    model_kind: ModelKind
    bounds: List[Tuple[float, float]]
    n_cells: List[int]
    initial_condition: Callable[..., Any]
    boundary: BoundaryKind
    scheme: SchemeKind
    cfl: float = Field(gt=0.0, le=1.0)
    t_end: float = Field(ge=0.0)
    reference: ReferenceKind = ReferenceKind.NONE
    exact_solution: Optional[Callable[..., Any]] = None
    eoc_grids: List[int] = Field(default_factory=list)
    reference_grid: Optional[int] = None
    description: str = ""

    @model_validator(mode="after")
    def check_dimensions(self) -> "CaseConfig":
        if len(self.bounds) != len(self.n_cells):
            raise ValueError("bounds and n_cells must have one entry per direction")
        if self.reference == ReferenceKind.EXACT and self.exact_solution is None:
            raise ValueError(f"case {self.name} declares an exact reference without a solution")
        if self.reference == ReferenceKind.SELF_CONVERGENCE and self.reference_grid is None:
            raise ValueError(f"case {self.name} needs a reference grid for self-convergence")
        return self

    @property
    def dim(self) -> int:
        return len(self.n_cells)


class RunManifest(BaseModel):
    command: Literal["run", "eoc", "audit"]
    case: str
    scheme: Optional[SchemeKind] = None
    nx: Optional[int] = Field(default=None, ge=4)
    ny: Optional[int] = Field(default=None, ge=4)
    cfl: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    t_end: Optional[float] = Field(default=None, ge=0.0)
    lambda_policy: LambdaPolicy = LambdaPolicy.PER_STEP
    lambda_safety: float = Field(default=1.1, gt=1.0)
    grids: Optional[List[int]] = None
    norm: NormWeight = NormWeight.COUNT
    out_dir: str = "output"
    report_every: int = Field(default=1, ge=1)
    audits: bool = True

    @model_validator(mode="after")
    def check_grids(self) -> "RunManifest":
        if self.grids is not None:
            if len(self.grids) < 2:
                raise ValueError("an EOC sweep needs at least two grids")
            if any(n < 4 for n in self.grids):
                raise ValueError("every grid needs at least 4 cells per direction")
        return self


# Report models
class EntropyReport(BaseModel):
    """Per-sample global entropy means and their step-to-step errors."""

    times: List[float] = Field(default_factory=list)
    eta_mean: List[float] = Field(default_factory=list)
    H_mean: List[List[float]] = Field(default_factory=list)
    signed_eta: List[float] = Field(default_factory=list)
    abs_eta: List[float] = Field(default_factory=list)
    signed_H: List[List[float]] = Field(default_factory=list)
    abs_H: List[List[float]] = Field(default_factory=list)

    @property
    def n_samples(self) -> int:
        return len(self.times)


class EocRow(BaseModel):
    n: int
    dx: float
    errors: List[float]
    orders: Optional[List[float]] = None


class EocTable(BaseModel):
    case: str
    components: List[str]
    rows: List[EocRow]


class AuditCheck(BaseModel):
    name: str
    value: float
    threshold: float
    passed: bool
