"""
Command-line front end.

    quantum-polar analyze CHANNEL
    quantum-polar polarize CHANNEL --n 3 --side phase --mode bounds
    quantum-polar design CHANNEL --n 3 [--private]
    quantum-polar simulate CHANNEL --n 1 --trials 4 [--private]
    quantum-polar superactivate JOINT_CHANNEL [--order 2,1]
    quantum-polar wiretap-embed PMF_FILE

Tables are CSV, everything else JSON. Exit codes: 0 success, 2 invalid input or a failed
invariant, 3 exact computation over budget.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError as SchemaError

from src.config import TEST_TOL, configure_logging
from src.errors import BudgetExceededError, InvariantViolation, ValidationError
from src.quantum.channels import Preprocessor, embed_classical_wiretap, induce_all
from src.quantum.design import (
    coherent_information,
    design_private,
    design_quantum,
    factor_rate_terms,
    private_information_search,
    superactivation_compose,
    uncertainty_report,
)
from src.quantum.polarize import Side, bounds_table, default_threshold, exact_table
from src.quantum.protosim import decoder_error_bound, run_private_protocol, run_quantum_protocol
from src.quantum.qcore import channel_fidelity
from src.schemas.run_schema import RunConfig
from src.services.channel_loader import (
    channel_to_file,
    describe_schema_error,
    load_channel,
    load_wiretap_pmf,
)
from src.services.report_service import (
    analyze_report,
    design_report,
    emit,
    private_protocol_report,
    protocol_report,
    render_json,
    render_table_csv,
    superactivation_report,
    table_report,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig.from_overrides(
        mode=args.mode or "exact",
        n=args.n,
        threshold=args.threshold,
        seed=args.seed,
        trials=args.trials,
        out=args.out,
        bit_reversal=False if args.no_bit_reversal else None,
    )


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    ch = load_channel(args.channel)
    summary = uncertainty_report(ch)
    search = None
    if ch.reservoir_split is not None and ch.kraus.d_in == 2:
        search = private_information_search(ch, restarts=args.restarts, seed=cfg.seed)
    emit(render_json(analyze_report(summary, search)), cfg.out)
    return EXIT_OK


def cmd_polarize(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    ch = load_channel(args.channel)
    side = Side(args.side)
    induced = induce_all(ch)
    W = {Side.AMPLITUDE: induced.w_a, Side.PHASE: induced.w_p, Side.RESERVOIR: induced.w_r}[side]
    if cfg.mode.value == "exact":
        table = exact_table(W, cfg.n, side, cfg.bit_reversal)
    else:
        table = bounds_table(channel_fidelity(W), cfg.n, side, cfg.bit_reversal)
    threshold = cfg.threshold if cfg.threshold is not None else default_threshold(cfg.N)
    report = table_report(table.validate(), ch.name, threshold, cfg.mode.value)
    emit(render_table_csv(report), cfg.out)
    return EXIT_OK


def cmd_design(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    ch = load_channel(args.channel)
    if args.private:
        design = design_private(
            ch, Preprocessor.identity(), cfg.n, cfg.threshold, cfg.mode.value, cfg.bit_reversal
        )
    else:
        design = design_quantum(ch, cfg.n, cfg.threshold, cfg.mode.value, cfg.bit_reversal)
    design.amplitude.validate()
    design.phase.validate()
    bound = decoder_error_bound(design.partition, design.amplitude, design.phase)
    emit(render_json(design_report(design, ch.name, cfg.mode.value, bound)), cfg.out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    ch = load_channel(args.channel)
    if args.private:
        preproc = Preprocessor.identity()
        part = design_private(
            ch, preproc, cfg.n, cfg.threshold, cfg.mode.value, cfg.bit_reversal
        ).partition
        result = run_private_protocol(
            ch, preproc, cfg.n, part, cfg.trials, cfg.seed, cfg.bit_reversal
        )
        report = private_protocol_report(result, ch.name, cfg.n, part)
    else:
        part = design_quantum(ch, cfg.n, cfg.threshold, cfg.mode.value, cfg.bit_reversal).partition
        result = run_quantum_protocol(ch, cfg.n, part, cfg.seed, cfg.trials, cfg.bit_reversal)
        report = protocol_report(result, ch.name, cfg.n, part)
    emit(render_json(report), cfg.out)
    return EXIT_OK


def _parse_order(raw: Optional[str]) -> Optional[list[int]]:
    if raw is None:
        return None
    try:
        return [int(part) for part in raw.split(",")]
    except ValueError as exc:
        raise ValidationError(
            f"expected comma-separated integers, got {raw!r}", field="order"
        ) from exc


def cmd_superactivate(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    ch = load_channel(args.channel)
    m = int(round(np.log2(ch.kraus.d_in)))
    if 2**m != ch.kraus.d_in or m < 1:
        raise ValidationError(f"input dimension {ch.kraus.d_in} is not a qubit count")
    terms = factor_rate_terms(ch.kraus, m, _parse_order(args.order))
    total = superactivation_compose(terms)
    joint = coherent_information(ch.kraus)
    report = superactivation_report(terms, total, ch.name, joint, TEST_TOL)
    emit(render_json(report), cfg.out)
    return EXIT_OK


def cmd_wiretap_embed(args: argparse.Namespace) -> int:
    pmf_file = load_wiretap_pmf(args.pmf)
    spec = embed_classical_wiretap(np.asarray(pmf_file.pmf), name=pmf_file.name)
    emit(render_json(channel_to_file(spec)), args.out)
    return EXIT_OK


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=None, help="Recursion depth (N = 2^n)")
    p.add_argument(
        "--threshold",
        type=float,
        default=None,
        help="Goodness threshold in (0, 1); an index is good iff F < threshold",
    )
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: POLAR_SEED)")
    p.add_argument("--trials", type=int, default=None, help="Protocol repetitions")
    p.add_argument("--mode", choices=["exact", "bounds"], default=None, help="Table mode")
    p.add_argument("--out", default=None, help="Output file (default: stdout)")
    p.add_argument(
        "--no-bit-reversal", action="store_true", help="Use G_N without the bit-reversal"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantum-polar", description="Polar codes for quantum channels"
    )
    parser.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=None
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="Induced channels, uncertainty sums, rates")
    p.add_argument("channel", help="Channel file (JSON)")
    p.add_argument("--restarts", type=int, default=4, help="Private search starts")
    _add_run_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("polarize", help="Per-index polarization table (CSV)")
    p.add_argument("channel", help="Channel file (JSON)")
    p.add_argument("--side", choices=[s.value for s in Side], default=Side.AMPLITUDE.value)
    _add_run_flags(p)
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("design", help="A/X/Z/B partition and rates")
    p.add_argument("channel", help="Channel file (JSON)")
    p.add_argument("--private", action="store_true", help="Private scheme (needs a split)")
    _add_run_flags(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="Coherent protocol at tiny blocklength")
    p.add_argument("channel", help="Channel file (JSON)")
    p.add_argument("--private", action="store_true", help="Private scheme (needs a split)")
    _add_run_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("superactivate", help="Per-factor rate composition of a joint channel")
    p.add_argument("channel", help="Multi-qubit channel file (JSON, kraus kind)")
    p.add_argument("--order", default=None, help="Factor order, e.g. 2,1")
    _add_run_flags(p)
    p.set_defaults(func=cmd_superactivate)

    p = sub.add_parser("wiretap-embed", help="Embed a classical wiretap pmf as a channel file")
    p.add_argument("pmf", help="JSON file with name and pmf[x][y][z]")
    p.add_argument("--out", default=None, help="Output file (default: stdout)")
    p.set_defaults(func=cmd_wiretap_embed)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    logger.info("running %s", args.command)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, InvariantViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SchemaError as exc:
        print(f"error: {describe_schema_error(exc)}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
