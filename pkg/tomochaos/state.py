"""
Shared Types
Configuration models, dynamics descriptors, run summaries and errors
"""
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, TypedDict

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class TomochaosError(ValueError):
    """Base class for all package errors"""


class ConfigError(TomochaosError):
    """Invalid experiment configuration; carries the offending field name"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        context = []
        if field:
            context.append(f"field '{field}'")
        if line is not None:
            context.append(f"line {line}")
        prefix = f"[{', '.join(context)}] " if context else ""
        super().__init__(f"{prefix}{message}")


class DimensionMismatchError(TomochaosError):
    """Operands live in Hilbert or operator spaces of different size"""


class NoInformationError(TomochaosError):
    """Measurement record resolves no direction of operator space"""


class ExperimentKind(str, Enum):
    """Experiments the runner knows how to execute"""
    PHASE_PORTRAIT = "PhasePortrait"
    FIDELITY_SWEEP = "FidelitySweep"
    ENTROPY_SWEEP = "EntropySweep"
    FISHER_SWEEP = "FisherSweep"
    ENSEMBLE_COMPARE = "EnsembleCompare"
    ANALYTIC_TABLE = "AnalyticTable"


class EnsembleKind(str, Enum):
    """Random-matrix sources of Floquet operators"""
    CUE = "CUE"
    COE = "COE"
    PARITY_BLOCK_COE = "ParityBlockCOE"
    HAAR_PER_STEP = "HaarPerStep"


class DynamicsKind(str, Enum):
    """Everything that can drive the measured observable"""
    KICKED_TOP_TR = "KickedTopTR"
    KICKED_TOP_NO_TR = "KickedTopNoTR"
    CUE = "CUE"
    COE = "COE"
    PARITY_BLOCK_COE = "ParityBlockCOE"
    HAAR_PER_STEP = "HaarPerStep"

    @classmethod
    def from_ensemble(cls, kind: EnsembleKind) -> "DynamicsKind":
        return cls(EnsembleKind(kind).value)


# (lambda_1, lambda_2, lambda_3, alpha_1, alpha_2, alpha_3), deep in the chaotic regime;
# lambda_1 != lambda_3 and alpha_1 != alpha_3, otherwise an x <-> z antiunitary symmetry survives
DEFAULT_NO_TR_PARAMS: Tuple[float, ...] = (7.0, 6.0, 8.5, 1.4, 1.1, 0.7)
SWEEP_LAMBDAS: Tuple[float, ...] = (0.5, 2.5, 3.0, 7.0)


def is_valid_spin(j: float) -> bool:
    """True when 2j is a positive integer"""
    two_j = 2.0 * j
    return j > 0 and abs(two_j - round(two_j)) < 1e-12


class DynamicsSpec(BaseModel):
    """Which unitary source drives the Heisenberg observables"""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kind: DynamicsKind = Field(description="Dynamics / ensemble kind")
    j: float = Field(default=10.0, description="Spin quantum number")
    alpha: float = Field(default=1.4, description="Precession angle about x")
    lam: float = Field(default=7.0, alias="lambda", description="Kick strength (chaoticity)")
    no_tr_params: Tuple[float, float, float, float, float, float] = DEFAULT_NO_TR_PARAMS
    no_tr_convention: str = Field(default="kicked_top", description="Quadratic normalisation of the non-TR map")

    @property
    def label(self) -> str:
        """Short curve label used in CSV output"""
        if self.kind == DynamicsKind.KICKED_TOP_TR:
            return f"KickedTopTR(lambda={self.lam:g})"
        return self.kind.value


class ExperimentConfig(BaseModel):
    """Validated experiment configuration (flat JSON document)"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)

    experiment: ExperimentKind
    j: float = 10.0
    alpha: float = 1.4
    lam: Optional[float] = Field(default=None, alias="lambda")
    lambda_list: Optional[List[float]] = None
    n_kicks: int = 100
    n_states: int = 100
    n_samples: int = 100
    n_traj: int = 50
    n_steps: int = 500
    sigma: float = 0.0
    seed: int = 0
    ensemble: Optional[EnsembleKind] = None
    dynamics: DynamicsKind = DynamicsKind.KICKED_TOP_TR
    no_tr_params: Tuple[float, float, float, float, float, float] = DEFAULT_NO_TR_PARAMS
    no_tr_convention: str = "kicked_top"
    evaluate_every: int = 1
    output: Optional[str] = None

    @field_validator("j")
    @classmethod
    def _check_spin(cls, value: float) -> float:
        if not is_valid_spin(value):
            raise ValueError("j must be a positive integer or half-integer")
        return value

    @field_validator("n_kicks", "n_states", "n_samples", "n_traj", "n_steps", "evaluate_every")
    @classmethod
    def _check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("sigma")
    @classmethod
    def _check_sigma(cls, value: float) -> float:
        if value < 0:
            raise ValueError("noise standard deviation must be >= 0")
        return value

    @field_validator("seed")
    @classmethod
    def _check_seed(cls, value: int) -> int:
        if value < 0:
            raise ValueError("seed must be a non-negative integer")
        return value

    @field_validator("lambda_list")
    @classmethod
    def _check_lambda_list(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and len(value) == 0:
            raise ValueError("lambda_list must not be empty")
        return value

    @field_validator("no_tr_convention")
    @classmethod
    def _check_convention(cls, value: str) -> str:
        if value not in ("kicked_top", "literal"):
            raise ValueError("no_tr_convention must be 'kicked_top' or 'literal'")
        return value

    @model_validator(mode="after")
    def _check_required(self) -> "ExperimentConfig":
        required = REQUIRED_FIELDS.get(self.experiment, ())
        for name in required:
            if getattr(self, name) is None:
                raise ValueError(f"missing required key '{ALIASES.get(name, name)}' for {self.experiment.value}")
        uses_parity = (
            self.ensemble == EnsembleKind.PARITY_BLOCK_COE
            or self.dynamics == DynamicsKind.PARITY_BLOCK_COE
            or self.experiment == ExperimentKind.ANALYTIC_TABLE
        )
        if uses_parity and abs(self.j - round(self.j)) > 1e-12:
            raise ValueError("parity-block ensembles need integer j")
        return self

    def dynamics_spec(self, kind: Optional[DynamicsKind] = None, lam: Optional[float] = None) -> DynamicsSpec:
        """Build the DynamicsSpec for one curve of this experiment"""
        return DynamicsSpec(
            kind=kind or self.dynamics,
            j=self.j,
            alpha=self.alpha,
            lam=lam if lam is not None else (self.lam if self.lam is not None else 7.0),
            no_tr_params=self.no_tr_params,
            no_tr_convention=self.no_tr_convention,
        )


REQUIRED_FIELDS: Dict[ExperimentKind, Tuple[str, ...]] = {
    ExperimentKind.PHASE_PORTRAIT: ("lam",),
    ExperimentKind.FIDELITY_SWEEP: ("lambda_list",),
    ExperimentKind.ENTROPY_SWEEP: ("lambda_list",),
    ExperimentKind.FISHER_SWEEP: ("lambda_list",),
    ExperimentKind.ENSEMBLE_COMPARE: ("ensemble",),
    ExperimentKind.ANALYTIC_TABLE: (),
}

ALIASES: Dict[str, str] = {"lam": "lambda"}


class RuntimeSettings(BaseModel):
    """Process-level settings resolved from the environment and CLI flags"""
    workers: int = Field(default=1, ge=1, description="Parallel worker processes")
    output_dir: str = Field(default="results", description="Directory for CSV/JSON artifacts")
    log_level: str = Field(default="INFO", description="Root logger level")
    debug_mode: bool = Field(default=False, description="Show technical details on failure")


class CheckResult(BaseModel):
    """One analytic-vs-empirical comparison"""
    name: str
    analytic: Optional[float] = None
    empirical: float
    tolerance: Optional[float] = None
    passed: Optional[bool] = None


class RunSummary(BaseModel):
    """JSON summary written next to the CSV output (see schema.json)"""
    experiment: ExperimentKind
    seed: int
    config: Dict[str, Any]
    analytic: Dict[str, Optional[float]]
    empirical: Dict[str, float]
    tolerance: Dict[str, Optional[float]]
    passed: Dict[str, Optional[bool]] = Field(alias="pass")
    all_passed: bool
    files: List[str]

    model_config = ConfigDict(populate_by_name=True)


class KickRow(TypedDict):
    """One row of a per-kick CSV"""
    curve: str
    n: int
    fidelity: float
    fidelity_sem: float
    entropy: float
    fisher: float
    trace_invC: float
    rank: int
    log_det: float
    hs_error: float
