"""
Report models written by the CLI.

Every report carries a `schema` name and `version`; tables go to CSV (one row model per
line, header comment carries the schema), everything nested goes to JSON.
"""

from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import REPORT_SCHEMA_VERSION, TEST_TOL


class VersionedReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_name: str = Field(..., alias="schema", description="Report schema name")
    version: str = Field(default=REPORT_SCHEMA_VERSION, description="Report schema version")


class RowClass(str, Enum):
    GOOD = "good"
    BAD = "bad"


class TableRow(BaseModel):
    index: int = Field(..., ge=1, description="One-based synthesized channel index")
    side: str = Field(..., description="amplitude, phase or reservoir")
    exact_I: Optional[float] = Field(None, description="Exact symmetric Holevo information")
    exact_F: Optional[float] = Field(None, description="Exact fidelity")
    f_bound: float = Field(..., description="Fidelity recursion upper bound")
    classification: RowClass = Field(..., description="good iff F is strictly below the threshold")


class PolarTableReport(VersionedReport):
    schema_name: str = Field(default="polar_table", alias="schema")
    channel: str
    side: str = Field(..., description="amplitude, phase or reservoir")
    n: int = Field(..., ge=0)
    mode: str
    threshold: float = Field(..., gt=0.0, lt=1.0)
    bit_reversal: bool
    rows: List[TableRow]

    @model_validator(mode="after")
    def _rows_cover_indices(self) -> "PolarTableReport":
        indices = [row.index for row in self.rows]
        if indices != list(range(1, 2**self.n + 1)):
            raise ValueError(f"rows must list indices 1..{2**self.n} in order")
        for row in self.rows:
            if row.side != self.side:
                raise ValueError(f"row {row.index} is on side {row.side}, table is {self.side}")
            values = [row.f_bound, row.exact_I, row.exact_F]
            if any(v is not None and not -TEST_TOL <= v <= 1 + TEST_TOL for v in values):
                raise ValueError(f"row {row.index} leaves [0, 1]")
            if row.exact_F is not None and row.exact_F > row.f_bound + TEST_TOL:
                raise ValueError(f"row {row.index}: exact F exceeds the recursion bound")
        return self


class PartitionModel(BaseModel):
    n: int = Field(..., ge=0)
    threshold: float
    provenance: str = Field(..., description="exact or bounds")
    A: List[int] = Field(..., description="Good for amplitude and phase: carries ebits")
    X: List[int] = Field(..., description="Good for amplitude only: frozen phase")
    Z: List[int] = Field(..., description="Good for phase only: frozen amplitude")
    B: List[int] = Field(..., description="Bad for both: consumes assistance")

    @model_validator(mode="after")
    def _is_partition(self) -> "PartitionModel":
        merged = sorted(self.A + self.X + self.Z + self.B)
        if merged != list(range(1, 2**self.n + 1)):
            raise ValueError("A, X, Z, B must partition the indices")
        return self


class RateModel(BaseModel):
    kind: str
    rate: float
    assistance_rate: float
    asymptotic_target: Optional[float] = None
    identity_holds: Optional[bool] = None
    components: List[float] = Field(default_factory=list)


class DesignReport(VersionedReport):
    schema_name: str = Field(default="design", alias="schema")
    channel: str
    mode: str
    partition: PartitionModel
    rate: RateModel
    identity_check: str = Field(..., description="pass or fail for |A|-|B| = |G_A|+|G_P|-N")
    decoder_error_bound: float


class PrivateSearchModel(BaseModel):
    value: float = Field(..., description="Certified I(Z;B) - I(Z;E) at the returned ensemble")
    bloch_vectors: List[List[float]]
    restarts: int
    seed: int
    evaluations: int


class AnalyzeReport(VersionedReport):
    schema_name: str = Field(default="analyze", alias="schema")
    channel: str
    info: Dict[str, float] = Field(..., description="Symmetric Holevo information per channel")
    fidelity: Dict[str, float] = Field(..., description="Fidelity per channel")
    information_sum: float = Field(..., description="I(W_P) + I(W_R)")
    entropic_sum: float = Field(..., description="H(Z^A|R) + H(X^A|BC)")
    coherent_information: float
    symmetric_coherent_information: float = Field(..., description="I(W_A) + I(W_P) - 1")
    assistance_vanishes: bool = Field(..., description="F(W_A) + F(W_P) <= 1")
    private_information_sum: Optional[float] = None
    private_entropic_sum: Optional[float] = None
    private_search: Optional[PrivateSearchModel] = None


class TrialModel(BaseModel):
    frozen_bits: str
    trace_distance: float
    amplitude_overlap: float


class ProtocolReport(VersionedReport):
    schema_name: str = Field(default="simulate", alias="schema")
    channel: str
    n: int
    seed: int
    ebits: int
    ebit_trace_distance: float
    worst_trace_distance: float
    amplitude_overlap: float
    decoder_error_bound: float
    partition: PartitionModel
    trials: List[TrialModel]


class SecurityChainModel(BaseModel):
    leakage: float
    info_sum: float
    fidelity_sum: float
    phase_surrogate_sum: float
    phase_bound: float
    holds: bool


class PrivateProtocolReport(VersionedReport):
    schema_name: str = Field(default="simulate_private", alias="schema")
    channel: str
    n: int
    seed: int
    block_error: float
    worst_block_error: float
    block_error_bound: float
    leakage: float
    chain: SecurityChainModel
    partition: PartitionModel
    trial_errors: List[float]


class FactorModel(BaseModel):
    factor: int = Field(..., ge=1)
    amplitude: float
    phase: float
    net: float


class SuperactivationReport(VersionedReport):
    schema_name: str = Field(default="superactivate", alias="schema")
    channel: str
    factors: int = Field(..., ge=1)
    order: List[int]
    terms: List[FactorModel]
    total: float
    joint_coherent_information: float
    matches: bool

    @model_validator(mode="after")
    def _order_is_permutation(self) -> "SuperactivationReport":
        if sorted(self.order) != list(range(1, self.factors + 1)):
            raise ValueError(f"order must permute 1..{self.factors}")
        return self
