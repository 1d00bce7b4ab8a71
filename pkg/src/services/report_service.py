"""
Service layer for report emission.

Turns domain results into report models, re-validates them, and renders CSV (tables) or
JSON (nested reports). Rendering is deterministic: the same result always yields the same
bytes.
"""

import io
import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel

from src.config import CSV_SCHEMA_VERSION
from src.quantum.design import (
    CodePartition,
    Design,
    FactorRateTerm,
    PrivateSearchResult,
    RateReport,
    UncertaintyReport,
)
from src.quantum.polarize import PolarTable, classify
from src.quantum.protosim import PrivateProtocolResult, ProtocolResult
from src.schemas.report_schema import (
    AnalyzeReport,
    DesignReport,
    FactorModel,
    PartitionModel,
    PolarTableReport,
    PrivateProtocolReport,
    PrivateSearchModel,
    ProtocolReport,
    RateModel,
    RowClass,
    SecurityChainModel,
    SuperactivationReport,
    TableRow,
    TrialModel,
)

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"
TABLE_COLUMNS = ["index", "side", "exact_I", "exact_F", "f_bound", "classification"]


def _optional(values: Optional[np.ndarray], k: int) -> Optional[float]:
    return None if values is None else float(values[k])


def table_report(
    table: PolarTable, channel: str, threshold: float, mode: str
) -> PolarTableReport:
    good = classify(table, threshold).good
    rows = [
        TableRow(
            index=int(i),
            side=table.side.value,
            exact_I=_optional(table.exact_I, i - 1),
            exact_F=_optional(table.exact_F, i - 1),
            f_bound=float(table.f_bound[i - 1]),
            classification=RowClass.GOOD if int(i) in good else RowClass.BAD,
        )
        for i in table.indices
    ]
    return PolarTableReport(
        channel=channel,
        side=table.side.value,
        n=table.n,
        mode=mode,
        threshold=threshold,
        bit_reversal=table.bit_reversal,
        rows=rows,
    )


def partition_model(part: CodePartition) -> PartitionModel:
    return PartitionModel(
        n=part.n,
        threshold=part.threshold,
        provenance=part.provenance,
        A=sorted(part.A),
        X=sorted(part.X),
        Z=sorted(part.Z),
        B=sorted(part.B),
    )


def rate_model(rate: RateReport) -> RateModel:
    return RateModel(
        kind=rate.kind,
        rate=rate.rate,
        assistance_rate=rate.assistance_rate,
        asymptotic_target=rate.asymptotic_target,
        identity_holds=rate.identity_holds,
        components=list(rate.components),
    )


def design_report(
    design: Design, channel: str, mode: str, decoder_error_bound: float
) -> DesignReport:
    return DesignReport(
        channel=channel,
        mode=mode,
        partition=partition_model(design.partition),
        rate=rate_model(design.rate),
        identity_check="pass" if design.rate.identity_holds else "fail",
        decoder_error_bound=decoder_error_bound,
    )


def analyze_report(
    summary: UncertaintyReport, search: Optional[PrivateSearchResult] = None
) -> AnalyzeReport:
    private_search = None
    if search is not None:
        private_search = PrivateSearchModel(
            value=search.value,
            bloch_vectors=[list(v) for v in search.bloch_vectors],
            restarts=search.restarts,
            seed=search.seed,
            evaluations=search.evaluations,
        )
    return AnalyzeReport(
        channel=summary.channel,
        info=summary.info,
        fidelity=summary.fidelity,
        information_sum=summary.information_sum,
        entropic_sum=summary.entropic_sum,
        coherent_information=summary.coherent_information,
        symmetric_coherent_information=summary.symmetric_coherent_information,
        assistance_vanishes=summary.assistance_vanishes,
        private_information_sum=summary.private_information_sum,
        private_entropic_sum=summary.private_entropic_sum,
        private_search=private_search,
    )


def protocol_report(
    result: ProtocolResult, channel: str, n: int, part: CodePartition
) -> ProtocolReport:
    return ProtocolReport(
        channel=channel,
        n=n,
        seed=result.seed,
        ebits=result.ebits,
        ebit_trace_distance=result.ebit_trace_distance,
        worst_trace_distance=result.worst_trace_distance,
        amplitude_overlap=result.amplitude_overlap,
        decoder_error_bound=result.decoder_error_bound,
        partition=partition_model(part),
        trials=[
            TrialModel(
                frozen_bits=t.frozen_bits,
                trace_distance=t.trace_distance,
                amplitude_overlap=t.amplitude_overlap,
            )
            for t in result.trials
        ],
    )


def private_protocol_report(
    result: PrivateProtocolResult, channel: str, n: int, part: CodePartition
) -> PrivateProtocolReport:
    chain = result.chain
    return PrivateProtocolReport(
        channel=channel,
        n=n,
        seed=result.seed,
        block_error=result.block_error,
        worst_block_error=result.worst_block_error,
        block_error_bound=result.block_error_bound,
        leakage=result.leakage,
        chain=SecurityChainModel(
            leakage=chain.leakage,
            info_sum=chain.info_sum,
            fidelity_sum=chain.fidelity_sum,
            phase_surrogate_sum=chain.phase_surrogate_sum,
            phase_bound=chain.phase_bound,
            holds=chain.holds(),
        ),
        partition=partition_model(part),
        trial_errors=list(result.trial_errors),
    )


def superactivation_report(
    terms: Sequence[FactorRateTerm],
    total: RateReport,
    channel: str,
    joint_coherent_information: float,
    tol: float,
) -> SuperactivationReport:
    return SuperactivationReport(
        channel=channel,
        factors=len(terms),
        order=[t.factor for t in terms],
        terms=[
            FactorModel(factor=t.factor, amplitude=t.amplitude, phase=t.phase, net=t.net)
            for t in terms
        ],
        total=total.rate,
        joint_coherent_information=joint_coherent_information,
        matches=abs(total.rate - joint_coherent_information) <= tol,
    )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def revalidate(model: BaseModel) -> BaseModel:
    """Round-trip through the model's validators; nothing is emitted if this fails."""
    return type(model).model_validate(model.model_dump())


def render_table_csv(report: PolarTableReport) -> str:
    report = revalidate(report)
    rows = [row.model_dump(mode="json") for row in report.rows]
    frame = pd.DataFrame(rows, columns=TABLE_COLUMNS)
    buf = io.StringIO()
    buf.write(
        f"# schema={report.schema_name} version={CSV_SCHEMA_VERSION} channel={report.channel} "
        f"side={report.side} n={report.n} mode={report.mode} "
        f"threshold={FLOAT_FORMAT % report.threshold}\n"
    )
    frame.to_csv(buf, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buf.getvalue()


def render_json(model: BaseModel) -> str:
    return revalidate(model).model_dump_json(indent=2, by_alias=True) + "\n"


def read_table_csv(path: str | Path) -> pd.DataFrame:
    """Load a table written by render_table_csv (the schema comment line is skipped)."""
    return pd.read_csv(path, comment="#")


def emit(text: str, out: Optional[str]) -> None:
    """Write to `out`, or print to stdout when no path is given."""
    if out is None:
        print(text, end="")
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("wrote %s (%d bytes)", path, len(text.encode("utf-8")))
