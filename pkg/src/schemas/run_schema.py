from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, field_validator

from src.config import get_run_defaults


class RunMode(str, Enum):
    EXACT = "exact"  # synthesized channels evaluated exactly, small n only
    BOUNDS = "bounds"  # fidelity recursion upper bounds, any n


class RunConfig(BaseModel):
    n: int = Field(..., ge=0, le=30, description="Recursion depth; blocklength is 2^n")
    threshold: Optional[float] = Field(
        None, description="Goodness threshold delta in (0, 1); defaults to 2^(-sqrt(N))"
    )
    seed: int = Field(..., ge=0, description="Seed for every random choice of the run")
    trials: int = Field(default=1, ge=1, description="Protocol repetitions")
    mode: RunMode = Field(default=RunMode.EXACT, description="exact or bounds tables")
    out: Optional[str] = Field(None, description="Output path; stdout when omitted")
    bit_reversal: bool = Field(default=True, description="Apply the bit-reversal permutation")

    @field_validator("threshold")
    @classmethod
    def _open_unit_interval(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not 0.0 < value < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {value}")
        return value

    @property
    def N(self) -> int:
        return 2**self.n

    @classmethod
    def from_overrides(cls, mode: str = "exact", **overrides) -> "RunConfig":
        """Mode defaults, then explicit overrides (None means not given)."""
        params = get_run_defaults(mode)
        params.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**params)
