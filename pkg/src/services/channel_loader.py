"""
Channel files to channel specs.

A channel file is JSON validated by the ChannelFile schema; Kraus completeness is checked
at CHANNEL_FILE_TOL. Errors name the offending field path.
"""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError as SchemaError

from src.config import CHANNEL_FILE_TOL
from src.errors import ValidationError
from src.quantum.channels import (
    QubitChannelSpec,
    amplitude_damping,
    dephasing,
    depolarizing,
    embed_classical_wiretap,
    erasure,
    identity_channel,
)
from src.quantum.qcore import KrausChannel
from src.schemas.channel_schema import (
    CHANNEL_FILE_ADAPTER,
    KrausChannelFile,
    PresetChannelFile,
    PresetName,
    WiretapPmfFile,
)

logger = logging.getLogger(__name__)

_PRESETS = {
    PresetName.DEPHASING: dephasing,
    PresetName.AMPLITUDE_DAMPING: amplitude_damping,
    PresetName.ERASURE: erasure,
    PresetName.DEPOLARIZING: depolarizing,
}


def _known_degradable(preset: PresetName, parameter: float | None) -> bool:
    if preset in (PresetName.IDENTITY, PresetName.DEPHASING):
        return True
    if preset in (PresetName.AMPLITUDE_DAMPING, PresetName.ERASURE):
        return parameter is not None and parameter <= 0.5
    return False


def describe_schema_error(exc: SchemaError) -> str:
    """One line per pydantic error, prefixed by its field path."""
    lines = []
    for err in exc.errors():
        path = ".".join(str(part) for part in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "; ".join(lines)


def _kraus_from_file(cfg: KrausChannelFile) -> KrausChannel:
    ops = []
    for op in cfg.kraus:
        arr = np.asarray(op, dtype=float)
        ops.append(arr[..., 0] + 1j * arr[..., 1])
    try:
        return KrausChannel(tuple(ops), tol=CHANNEL_FILE_TOL)
    except ValidationError as exc:
        raise ValidationError(str(exc), field="kraus") from exc


def spec_from_file(cfg: Union[KrausChannelFile, PresetChannelFile]) -> QubitChannelSpec:
    """
    Build the channel spec a validated channel file describes.

    Args:
        cfg: Parsed channel file.

    Returns:
        QubitChannelSpec; for classical_wiretap the embedding's own reservoir split is used
        unless the file overrides it.
    """
    if isinstance(cfg, KrausChannelFile):
        return QubitChannelSpec(
            name=cfg.name,
            kraus=_kraus_from_file(cfg),
            reservoir_split=cfg.reservoir_split,
            degradable=cfg.degradable,
        )

    if cfg.preset is PresetName.CLASSICAL_WIRETAP:
        name = cfg.name or "classical_wiretap"
        embedded = embed_classical_wiretap(np.asarray(cfg.pmf), name=name)
        return QubitChannelSpec(
            name=embedded.name,
            kraus=embedded.kraus,
            reservoir_split=cfg.reservoir_split or embedded.reservoir_split,
            degradable=bool(cfg.degradable),
        )

    if cfg.preset is PresetName.IDENTITY:
        kraus = identity_channel()
        default_name = "identity"
    else:
        kraus = _PRESETS[cfg.preset](cfg.parameter)
        default_name = f"{cfg.preset.value}({cfg.parameter:g})"
    degradable = cfg.degradable
    if degradable is None:
        degradable = _known_degradable(cfg.preset, cfg.parameter)
    return QubitChannelSpec(
        name=cfg.name or default_name,
        kraus=kraus,
        reservoir_split=cfg.reservoir_split,
        degradable=degradable,
    )


def parse_channel(data: dict) -> QubitChannelSpec:
    try:
        cfg = CHANNEL_FILE_ADAPTER.validate_python(data)
    except SchemaError as exc:
        raise ValidationError(describe_schema_error(exc), field="channel file") from exc
    return spec_from_file(cfg)


def _read_json(path: Union[str, Path]) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"line {exc.lineno} column {exc.colno}: {exc.msg}", field=str(path)
        ) from exc


def load_channel(path: Union[str, Path]) -> QubitChannelSpec:
    """Read and validate a channel file."""
    spec = parse_channel(_read_json(path))
    logger.info(
        "loaded channel %s: d_in=%d d_out=%d, %d Kraus operators",
        spec.name,
        spec.kraus.d_in,
        spec.kraus.d_out,
        len(spec.kraus.kraus_ops),
    )
    return spec


def load_wiretap_pmf(path: Union[str, Path]) -> WiretapPmfFile:
    try:
        return WiretapPmfFile.model_validate(_read_json(path))
    except SchemaError as exc:
        raise ValidationError(describe_schema_error(exc), field="pmf file") from exc


def channel_to_file(spec: QubitChannelSpec) -> KrausChannelFile:
    """Kraus-kind channel file for a spec; exact inverse of the loader up to float repr."""
    ops = [
        [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(op)]
        for op in spec.kraus.kraus_ops
    ]
    return KrausChannelFile(
        name=spec.name,
        kraus=ops,
        reservoir_split=spec.reservoir_split,
        degradable=spec.degradable,
    )
