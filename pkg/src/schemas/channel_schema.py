from enum import Enum
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, TypeAdapter, field_validator, model_validator

# A complex number is written as [re, im]; no string-encoded math.
ComplexEntry = Annotated[List[float], Field(min_length=2, max_length=2)]
ComplexMatrix = List[List[ComplexEntry]]


class PresetName(str, Enum):
    IDENTITY = "identity"
    DEPHASING = "dephasing"
    AMPLITUDE_DAMPING = "amplitude_damping"
    ERASURE = "erasure"
    DEPOLARIZING = "depolarizing"
    CLASSICAL_WIRETAP = "classical_wiretap"


PARAMETERLESS = {PresetName.IDENTITY, PresetName.CLASSICAL_WIRETAP}


class KrausChannelFile(BaseModel):
    kind: Literal["kraus"] = "kraus"
    name: str = Field(..., min_length=1, description="Channel name used in reports")
    kraus: List[ComplexMatrix] = Field(
        ..., min_length=1, description="Kraus operators, row-major, entries as [re, im]"
    )
    reservoir_split: Optional[Tuple[int, int]] = Field(
        None, description="(dim S, dim E) factorization of the Stinespring environment"
    )
    degradable: bool = Field(
        default=False, description="User assertion that the channel is degradable"
    )

    @field_validator("kraus")
    @classmethod
    def _rectangular(cls, ops: List[ComplexMatrix]) -> List[ComplexMatrix]:
        shape = None
        for k, op in enumerate(ops):
            if not op or any(len(row) != len(op[0]) for row in op):
                raise ValueError(f"operator {k} is not a rectangular matrix")
            this = (len(op), len(op[0]))
            if shape is not None and this != shape:
                raise ValueError(f"operator {k} has shape {this}, operator 0 has {shape}")
            shape = this
        return ops


class PresetChannelFile(BaseModel):
    kind: Literal["preset"] = "preset"
    preset: PresetName
    name: Optional[str] = Field(None, description="Defaults to preset(parameter)")
    parameter: Optional[float] = Field(
        None, ge=0.0, le=1.0, description="p or gamma; unused by identity and classical_wiretap"
    )
    pmf: Optional[List[List[List[float]]]] = Field(
        None, description="p(y, z | x) indexed [x][y][z]; classical_wiretap only"
    )
    reservoir_split: Optional[Tuple[int, int]] = Field(
        None, description="(dim S, dim E) factorization of the Stinespring environment"
    )
    degradable: Optional[bool] = Field(
        None, description="Overrides the preset's known degradability"
    )

    @model_validator(mode="after")
    def _parameters_match_preset(self) -> "PresetChannelFile":
        if self.preset not in PARAMETERLESS and self.parameter is None:
            raise ValueError(f"preset {self.preset.value} needs a parameter")
        if self.preset is PresetName.CLASSICAL_WIRETAP and self.pmf is None:
            raise ValueError("classical_wiretap needs a pmf table")
        if self.preset is not PresetName.CLASSICAL_WIRETAP and self.pmf is not None:
            raise ValueError(f"pmf is only valid for classical_wiretap, not {self.preset.value}")
        return self


ChannelFile = Annotated[
    Union[KrausChannelFile, PresetChannelFile], Field(discriminator="kind")
]
CHANNEL_FILE_ADAPTER = TypeAdapter(ChannelFile)


class WiretapPmfFile(BaseModel):
    """Input of the wiretap-embed command."""

    name: str = Field(default="classical_wiretap", description="Name of the embedded channel")
    pmf: List[List[List[float]]] = Field(
        ..., min_length=1, description="p(y, z | x) indexed [x][y][z]"
    )
