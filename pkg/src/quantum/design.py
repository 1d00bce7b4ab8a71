"""
Code design from polarization tables.

Indices are split by the goodness of their amplitude and phase channels into
A (both good), X (amplitude only), Z (phase only) and B (neither). The quantum rate is
(|A| - |B|) / N; B indices consume entanglement (or secret key in the private scheme).
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from src.config import MAX_DENSITY_DIM, STRUCTURAL_TOL, TEST_TOL
from src.errors import BudgetExceededError, InvariantViolation, ValidationError
from src.quantum.channels import (
    Preprocessor,
    QubitChannelSpec,
    induce_all,
    induce_private,
    uncertainty_sum,
)
from src.quantum.polarize import (
    PolarTable,
    Side,
    bounds_table,
    classify,
    default_threshold,
    exact_table,
)
from src.quantum.qcore import (
    DensityOperator,
    KrausChannel,
    PureState,
    channel_fidelity,
    holevo_information,
    measure_basis,
    mutual_information,
    partial_trace,
    stinespring,
    von_neumann_entropy,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CodePartition:
    n: int
    A: frozenset[int]
    X: frozenset[int]
    Z: frozenset[int]
    B: frozenset[int]
    threshold: float
    provenance: str
    good_amplitude: frozenset[int] = field(default_factory=frozenset)
    good_phase: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        sets = (self.A, self.X, self.Z, self.B)
        union = frozenset().union(*sets)
        if union != frozenset(range(1, self.N + 1)) or sum(len(s) for s in sets) != self.N:
            raise InvariantViolation("A, X, Z, B must partition the indices 1..N")

    @property
    def N(self) -> int:
        return 2**self.n

    def role(self, i: int) -> str:
        for name in ("A", "X", "Z", "B"):
            if i in getattr(self, name):
                return name
        raise ValidationError(f"index {i} outside 1..{self.N}")


@dataclass(frozen=True)
class RateReport:
    kind: str
    rate: float
    assistance_rate: float
    asymptotic_target: Optional[float] = None
    identity_holds: Optional[bool] = None
    components: tuple[float, ...] = ()


def partition(
    amp: PolarTable, phase: PolarTable, threshold: Optional[float] = None
) -> CodePartition:
    """
    Split [N] into A/X/Z/B from an amplitude table and a phase table.

    Args:
        amp: Amplitude-side table.
        phase: Phase-side table, already in phase index order.
        threshold: Goodness threshold; defaults to 2^{-sqrt(N)}.

    Returns:
        The partition, with provenance "exact" only when both tables are exact.
    """
    if amp.n != phase.n:
        raise ValidationError(f"mixed N: amplitude n={amp.n}, phase n={phase.n}")
    delta = default_threshold(amp.N) if threshold is None else threshold
    good_a = classify(amp, delta).good
    good_p = classify(phase, delta).good
    everything = frozenset(range(1, amp.N + 1))
    provenance = "exact" if amp.is_exact and phase.is_exact else "bounds"
    return CodePartition(
        n=amp.n,
        A=good_a & good_p,
        X=good_a - good_p,
        Z=good_p - good_a,
        B=everything - good_a - good_p,
        threshold=delta,
        provenance=provenance,
        good_amplitude=good_a,
        good_phase=good_p,
    )


def rate_identity_check(p: CodePartition) -> bool:
    """|A| - |B| = |G_A| + |G_P| - N."""
    return len(p.A) - len(p.B) == len(p.good_amplitude) + len(p.good_phase) - p.N


def quantum_rate(p: CodePartition, target: Optional[float] = None) -> RateReport:
    return RateReport(
        kind="quantum",
        rate=(len(p.A) - len(p.B)) / p.N,
        assistance_rate=len(p.B) / p.N,
        asymptotic_target=target,
        identity_holds=rate_identity_check(p),
    )


def private_rate(p: CodePartition, target: Optional[float] = None) -> RateReport:
    """Private bits per use; B indices consume secret key instead of ebits."""
    return RateReport(
        kind="private",
        rate=(len(p.A) - len(p.B)) / p.N,
        assistance_rate=len(p.B) / p.N,
        asymptotic_target=target,
        identity_holds=rate_identity_check(p),
    )


def _choi_state(ch: KrausChannel) -> np.ndarray:
    """(id (x) N)(Phi) as a (d_in * d_out) square matrix, reference first."""
    d = ch.d_in
    phi = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    rho = np.outer(phi, phi.conj()).reshape(d, d, d, d)  # [a, a', b, b']
    out = np.zeros((d, ch.d_out, d, ch.d_out), dtype=complex)
    for a in range(d):
        for b in range(d):
            out[a, :, b, :] = ch.apply(rho[a, :, b, :])
    return out.reshape(d * ch.d_out, d * ch.d_out)


def coherent_information(ch: QubitChannelSpec | KrausChannel) -> float:
    """H(B) - H(AB) of (id (x) N)(Phi); also accepts multi-qubit Kraus channels."""
    kraus = ch.kraus if isinstance(ch, QubitChannelSpec) else ch
    size = kraus.d_in * kraus.d_out
    if size > MAX_DENSITY_DIM:
        raise BudgetExceededError("coherent information", size, MAX_DENSITY_DIM)
    tau = DensityOperator(_choi_state(kraus), (kraus.d_in, kraus.d_out), ("A", "B"))
    return von_neumann_entropy(partial_trace(tau, ["B"])) - von_neumann_entropy(tau)


# ---------------------------------------------------------------------------
# Designs
# ---------------------------------------------------------------------------


def _tables(w_a, w_p, n: int, mode: str, bit_reversal: bool) -> tuple[PolarTable, PolarTable]:
    if mode == "exact":
        return (
            exact_table(w_a, n, Side.AMPLITUDE, bit_reversal),
            exact_table(w_p, n, Side.PHASE, bit_reversal),
        )
    if mode == "bounds":
        return (
            bounds_table(channel_fidelity(w_a), n, Side.AMPLITUDE, bit_reversal),
            bounds_table(channel_fidelity(w_p), n, Side.PHASE, bit_reversal),
        )
    raise ValidationError(f"mode must be exact or bounds, got {mode!r}", field="mode")


@dataclass(frozen=True)
class Design:
    partition: CodePartition
    rate: RateReport
    amplitude: PolarTable
    phase: PolarTable


def design_quantum(
    ch: QubitChannelSpec,
    n: int,
    threshold: Optional[float] = None,
    mode: str = "exact",
    bit_reversal: bool = True,
) -> Design:
    induced = induce_all(ch)
    amp, phase = _tables(induced.w_a, induced.w_p, n, mode, bit_reversal)
    part = partition(amp, phase, threshold)
    report = quantum_rate(part, target=coherent_information(ch))
    logger.info("quantum design %s n=%d: |A|=%d |B|=%d", ch.name, n, len(part.A), len(part.B))
    return Design(part, report, amp, phase)


def design_private(
    ch: QubitChannelSpec,
    preproc: Preprocessor,
    n: int,
    threshold: Optional[float] = None,
    mode: str = "exact",
    bit_reversal: bool = True,
) -> Design:
    induced = induce_private(ch, preproc)
    amp, phase = _tables(induced.w_a_bar, induced.w_p_bar, n, mode, bit_reversal)
    part = partition(amp, phase, threshold)
    target = private_information(ch, preproc)
    report = private_rate(part, target=target)
    logger.info("private design %s n=%d: |A|=%d |B|=%d", ch.name, n, len(part.A), len(part.B))
    return Design(part, report, amp, phase)


# ---------------------------------------------------------------------------
# Private information
# ---------------------------------------------------------------------------


def private_information(ch: QubitChannelSpec, preproc: Preprocessor) -> float:
    """I(Z;B) - I(Z;E) for uniform Z under the given preprocessor."""
    induced = induce_private(ch, preproc)
    return holevo_information(induced.w_a_bar) - holevo_information(induced.w_e_bar)


@dataclass(frozen=True)
class PrivateSearchResult:
    value: float
    preprocessor: Preprocessor
    bloch_vectors: tuple[tuple[float, ...], tuple[float, ...]]
    restarts: int
    seed: int
    evaluations: int


_BASIS_START = np.array([0.0, 0.0, 1.0, 0.0, 0.0, -1.0])


def _clip_to_ball(params: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v0, v1 = params[:3], params[3:]
    return v0 / max(1.0, float(np.linalg.norm(v0))), v1 / max(1.0, float(np.linalg.norm(v1)))


def private_information_search(
    ch: QubitChannelSpec, restarts: int = 4, seed: int = 0, max_iter: int = 400
) -> PrivateSearchResult:
    """
    Heuristic lower bound on the symmetric private information.

    Nelder-Mead over the two Bloch vectors of the signal states, started once from the
    computational basis and then from seeded random points in the ball. The reported value
    is recomputed from the returned preprocessor.
    """
    if ch.reservoir_split is None:
        raise ValidationError("private search needs a reservoir split", field="reservoir_split")
    if restarts < 1:
        raise ValidationError(f"need at least one start, got {restarts}", field="restarts")
    rng = np.random.default_rng(seed)
    evaluations = 0

    def objective(params: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        v0, v1 = _clip_to_ball(params)
        return -private_information(ch, Preprocessor.from_bloch(v0, v1))

    starts = [_BASIS_START]
    for _ in range(restarts - 1):
        direction = rng.normal(size=(2, 3))
        radius = rng.uniform(size=(2, 1)) ** (1.0 / 3.0)
        unit = direction / np.linalg.norm(direction, axis=1, keepdims=True)
        starts.append((unit * radius).ravel())

    best_params, best_value = _BASIS_START, objective(_BASIS_START)
    for k, start in enumerate(starts):
        result = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={"maxiter": max_iter, "xatol": 1e-8, "fatol": 1e-11},
        )
        logger.debug("private search start %d: value %.9f", k, -result.fun)
        if result.fun < best_value:
            best_params, best_value = result.x, result.fun

    v0, v1 = _clip_to_ball(np.asarray(best_params))
    preproc = Preprocessor.from_bloch(v0, v1)
    certified = private_information(ch, preproc)
    if abs(certified + best_value) > STRUCTURAL_TOL:
        raise InvariantViolation(
            f"private search value {-best_value:.12g} not reproduced ({certified:.12g})"
        )
    return PrivateSearchResult(
        value=certified,
        preprocessor=preproc,
        bloch_vectors=(tuple(float(c) for c in v0), tuple(float(c) for c in v1)),
        restarts=restarts,
        seed=seed,
        evaluations=evaluations,
    )


# ---------------------------------------------------------------------------
# Assistance-vanishing checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DisjointnessReport:
    n: int
    threshold: float
    fidelity_relation_holds: bool
    worst_fidelity_margin: float
    phase_reservoir_disjoint: bool
    assisted_reservoir_disjoint: Optional[bool]
    assisted: frozenset[int]
    good_phase: frozenset[int]
    good_reservoir: frozenset[int]

    @property
    def passed(self) -> bool:
        checks = [self.fidelity_relation_holds, self.phase_reservoir_disjoint]
        if self.assisted_reservoir_disjoint is not None:
            checks.append(self.assisted_reservoir_disjoint)
        return all(checks)


def degradable_disjointness_check(
    ch: QubitChannelSpec, n: int, threshold: Optional[float] = None, bit_reversal: bool = True
) -> DisjointnessReport:
    """
    Exact check that B, G(W_P) and G(W_R) do not overlap.

    Per index, 2 F(W_P^{(i)}) + F(W_R^{(i)}) >= 1 is verified; the B / G(W_R) disjointness
    is only asserted when the channel is declared degradable.
    """
    induced = induce_all(ch)
    amp = exact_table(induced.w_a, n, Side.AMPLITUDE, bit_reversal)
    phase = exact_table(induced.w_p, n, Side.PHASE, bit_reversal)
    reservoir = exact_table(induced.w_r, n, Side.RESERVOIR, bit_reversal)
    part = partition(amp, phase, threshold)
    good_r = classify(reservoir, part.threshold).good
    margins = 2.0 * phase.exact_F + reservoir.exact_F - 1.0
    report = DisjointnessReport(
        n=n,
        threshold=part.threshold,
        fidelity_relation_holds=bool(np.all(margins >= -TEST_TOL)),
        worst_fidelity_margin=float(np.min(margins)),
        phase_reservoir_disjoint=not (part.good_phase & good_r),
        assisted_reservoir_disjoint=(not (part.B & good_r)) if ch.degradable else None,
        assisted=part.B,
        good_phase=part.good_phase,
        good_reservoir=good_r,
    )
    if not report.passed:
        logger.warning("disjointness check failed for %s at n=%d", ch.name, n)
    return report


@dataclass(frozen=True)
class ErasureBoundReport:
    f_amplitude: float
    f_phase: float
    holds: bool


def erasure_bound_check(ch: QubitChannelSpec) -> ErasureBoundReport:
    """F(W_A) + F(W_P) <= 1, under which the assistance rate vanishes."""
    induced = induce_all(ch)
    f_a = channel_fidelity(induced.w_a)
    f_p = channel_fidelity(induced.w_p)
    return ErasureBoundReport(f_amplitude=f_a, f_phase=f_p, holds=f_a + f_p <= 1.0 + STRUCTURAL_TOL)


# ---------------------------------------------------------------------------
# Single-channel summary
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UncertaintyReport:
    channel: str
    info: dict[str, float]
    fidelity: dict[str, float]
    information_sum: float
    entropic_sum: float
    coherent_information: float
    symmetric_coherent_information: float
    assistance_vanishes: bool
    private_information_sum: Optional[float] = None
    private_entropic_sum: Optional[float] = None


def uncertainty_report(
    ch: QubitChannelSpec, preproc: Optional[Preprocessor] = None
) -> UncertaintyReport:
    """
    I and F of every induced channel plus both forms of the uncertainty relation.

    Args:
        ch: Qubit channel; its reservoir split, if any, adds the private channels.
        preproc: Preprocessor for the private channels; identity when omitted.

    Returns:
        The report. `symmetric_coherent_information` is I(W_A) + I(W_P) - 1.
    """
    private = ch.reservoir_split is not None
    if private:
        induced = induce_private(ch, preproc or Preprocessor.identity())
    else:
        induced = induce_all(ch)
    channels = {"W_A": induced.w_a, "W_P": induced.w_p, "W_R": induced.w_r}
    if private:
        channels.update(
            {
                "W_A_bar": induced.w_a_bar,
                "W_P_bar": induced.w_p_bar,
                "W_P_bar_BC": induced.w_p_bar_unshielded,
                "W_E_bar": induced.w_e_bar,
            }
        )
    info = {key: holevo_information(w) for key, w in channels.items()}
    fid = {key: channel_fidelity(w) for key, w in channels.items()}
    env = tuple(lbl for lbl in induced.psi.labels if lbl not in ("A", "B", "C"))
    report = UncertaintyReport(
        channel=ch.name,
        info=info,
        fidelity=fid,
        information_sum=info["W_P"] + info["W_R"],
        entropic_sum=uncertainty_sum(induced.psi, env, ("B", "C")),
        coherent_information=coherent_information(ch),
        symmetric_coherent_information=info["W_A"] + info["W_P"] - 1.0,
        assistance_vanishes=fid["W_A"] + fid["W_P"] <= 1.0 + STRUCTURAL_TOL,
        private_information_sum=(info["W_P_bar"] + info["W_E_bar"]) if private else None,
        private_entropic_sum=(
            uncertainty_sum(induced.psi_bar, ("E",), ("B", "C", "S", "S'")) if private else None
        ),
    )
    if abs(report.information_sum - 1.0) > TEST_TOL:
        logger.warning("I(W_P) + I(W_R) = %.12g for %s", report.information_sum, ch.name)
    return report


# ---------------------------------------------------------------------------
# Multi-qubit rate composition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorRateTerm:
    factor: int
    amplitude: float
    phase: float

    @property
    def net(self) -> float:
        return self.amplitude + self.phase - 1.0


def _joint_channel_state(joint: KrausChannel, m: int) -> PureState:
    """2^{-m/2} sum_z |z>^{A_1..A_m} |z>^{C_1..C_m} U|z>^{BR}."""
    if joint.d_in != 2**m:
        raise ValidationError(f"joint channel input {joint.d_in} is not {m} qubits")
    iso = stinespring(joint)
    d_b, d_r = iso.out_dims
    total = 4**m * d_b * d_r
    if total > MAX_DENSITY_DIM:
        raise BudgetExceededError(f"{m}-factor rate composition", total, MAX_DENSITY_DIM)
    d = 2**m
    signals = np.moveaxis(iso.matrix.reshape(d_b, d_r, d), -1, 0)  # [z, b, r]
    t = np.zeros((d, d, d_b, d_r), dtype=complex)
    for z in range(d):
        t[z, z] = signals[z] / np.sqrt(d)
    dims = (2,) * m + (2,) * m + (d_b, d_r)
    labels = tuple(f"A{k}" for k in range(1, m + 1)) + tuple(f"C{k}" for k in range(1, m + 1))
    return PureState(t.reshape(-1), dims, labels + ("B", "R"))


def factor_rate_terms(
    joint: KrausChannel, m: int, order: Optional[Sequence[int]] = None
) -> list[FactorRateTerm]:
    """
    Chain-rule terms I(Z_k; B Z_<k) and I(X_k; B C X_<k) for the factors in `order`.

    Args:
        joint: Channel on m qubits (input dimension 2^m).
        m: Number of qubit factors.
        order: One-based factor order; defaults to 1..m.

    Returns:
        One term per factor, in the order they were conditioned.
    """
    order = list(order) if order is not None else list(range(1, m + 1))
    if sorted(order) != list(range(1, m + 1)):
        raise ValidationError(f"order {order} is not a permutation of 1..{m}", field="order")
    psi = _joint_channel_state(joint, m)
    amp_state = psi.to_density()
    phase_state = psi.to_density()
    for k in range(1, m + 1):
        amp_state = measure_basis(amp_state, f"A{k}", "amplitude")
        phase_state = measure_basis(phase_state, f"A{k}", "phase")
    copies = [f"C{k}" for k in range(1, m + 1)]
    terms, seen = [], []
    for k in order:
        amp = mutual_information(amp_state, [f"A{k}"], ["B"] + seen)
        phase = mutual_information(phase_state, [f"A{k}"], ["B"] + copies + seen)
        terms.append(FactorRateTerm(factor=k, amplitude=amp, phase=phase))
        seen.append(f"A{k}")
    return terms


def superactivation_compose(terms: Sequence[FactorRateTerm]) -> RateReport:
    """Sum of per-factor net rates; equals the joint coherent information."""
    components = tuple(t.net for t in terms)
    return RateReport(
        kind="superactivation",
        rate=float(sum(components)),
        assistance_rate=0.0,
        asymptotic_target=float(sum(components)),
        components=components,
    )
