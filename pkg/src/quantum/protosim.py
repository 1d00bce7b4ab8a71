"""
State-vector simulation of the coding protocols at tiny blocklengths.

The quantum protocol runs the coherent encoder, the channel dilations, the coherent
amplitude decoder, the coherent phase decoder and the final decoupling on one named-register
state vector, then compares Alice's references with Bob's output qubits against ideal ebits.
The private protocol evaluates the successive cancellation decoder and the eavesdropper's
information exactly.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterator, Mapping, Optional, Sequence

import numpy as np

from src.config import MAX_DENSITY_DIM, MAX_STATEVECTOR_DIM, TEST_TOL
from src.errors import BudgetExceededError, ValidationError
from src.quantum.channels import Preprocessor, QubitChannelSpec, induce_all, induce_private
from src.quantum.design import CodePartition
from src.quantum.polarize import PolarTable, PolarTransform, Side, exact_table
from src.quantum.qcore import (
    HADAMARD,
    PAULI_X,
    PAULI_Z,
    CqChannel,
    DensityOperator,
    Isometry,
    basis_vector,
    psd_pinv_sqrt,
    psd_sqrt,
    trace_distance,
    von_neumann_entropy,
)

logger = logging.getLogger(__name__)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
BELL = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)


def build_encoder(n: int, bit_reversal: bool = True) -> Isometry:
    """Coherent encoder U|z^N> = |z^N G_N> as a permutation unitary on N qubits."""
    transform = PolarTransform(n, bit_reversal)
    size = 2**transform.N
    if size > MAX_DENSITY_DIM:
        raise BudgetExceededError(f"dense encoder for N={transform.N}", size, MAX_DENSITY_DIM)
    matrix = np.zeros((size, size), dtype=complex)
    for col, word in enumerate(itertools.product((0, 1), repeat=transform.N)):
        row = int("".join(str(b) for b in transform.encode(word)), 2)
        matrix[row, col] = 1.0
    labels = tuple(f"Q{j}" for j in range(1, transform.N + 1))
    return Isometry(matrix, (2,) * transform.N, labels)


def pretty_good_measurement(s0: np.ndarray, s1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Square-root measurement for equiprobable states; the kernel of s0 + s1 goes to outcome 0."""
    inv_root, kernel = psd_pinv_sqrt(s0 + s1)
    return inv_root @ s0 @ inv_root + kernel, inv_root @ s1 @ inv_root


class SuccessiveCancellationPOVM:
    """
    Sequential binary tests of a synthesized-channel decoder.

    The amplitude side decodes indices 1..N conditioned on the past; the phase side uses
    G_N^T and decodes N..1 conditioned on the future. Frozen indices are never measured.
    """

    def __init__(
        self,
        W: CqChannel,
        n: int,
        frozen: Mapping[int, int],
        side: Side = Side.AMPLITUDE,
        bit_reversal: bool = True,
    ):
        if side not in (Side.AMPLITUDE, Side.PHASE):
            raise ValidationError(f"decoder side must be amplitude or phase, got {side}")
        if not isinstance(W.zero, DensityOperator):
            raise ValidationError("decoder needs a cq channel with plain density outputs")
        transform = PolarTransform(n, bit_reversal)
        self.n = n
        self.N = transform.N
        self.side = side
        self.frozen = {int(k): int(v) for k, v in frozen.items()}
        for index, value in self.frozen.items():
            if not 1 <= index <= self.N or value not in (0, 1):
                raise ValidationError(f"bad frozen entry {index}: {value}", field="frozen")
        self._matrix = transform.matrix if side is Side.AMPLITUDE else transform.matrix.T
        self._outputs = [W.zero.matrix, W.one.matrix]
        self.dim = self._outputs[0].shape[0] ** self.N
        if self.dim > MAX_DENSITY_DIM:
            raise BudgetExceededError(
                f"{side.value} decoder at N={self.N}", self.dim, MAX_DENSITY_DIM
            )
        self.order = list(range(1, self.N + 1))
        if side is Side.PHASE:
            self.order.reverse()
        self._cache: dict[tuple[int, tuple[int, ...]], tuple[np.ndarray, np.ndarray]] = {}

    @property
    def info_indices(self) -> list[int]:
        return [i for i in self.order if i not in self.frozen]

    def known_positions(self, i: int) -> list[int]:
        """Indices whose values are available when index i is decided."""
        if self.side is Side.AMPLITUDE:
            return list(range(1, i))
        return list(range(i + 1, self.N + 1))

    def conditional_states(
        self, i: int, known_bits: Sequence[int]
    ) -> tuple[np.ndarray, np.ndarray]:
        known = [j - 1 for j in self.known_positions(i)]
        if len(known_bits) != len(known):
            raise ValidationError(f"index {i} needs {len(known)} known bits, got {len(known_bits)}")
        hidden = [j for j in range(self.N) if j != i - 1 and j not in known]
        states = []
        for bit in (0, 1):
            acc = np.zeros((self.dim, self.dim), dtype=complex)
            for pattern in itertools.product((0, 1), repeat=len(hidden)):
                u = np.zeros(self.N, dtype=np.int64)
                u[known] = known_bits
                u[i - 1] = bit
                u[hidden] = pattern
                word = (u @ self._matrix) % 2
                acc += reduce(np.kron, [self._outputs[v] for v in word])
            states.append(acc / 2 ** len(hidden))
        return states[0], states[1]

    def measurement(self, i: int, known_bits: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """(sqrt Lambda_0, sqrt Lambda_1) for index i given the known bits in index order."""
        key = (i, tuple(int(b) for b in known_bits))
        if key not in self._cache:
            lam0, lam1 = pretty_good_measurement(*self.conditional_states(i, key[1]))
            self._cache[key] = (psd_sqrt(lam0), psd_sqrt(lam1))
        return self._cache[key]

    def kraus_for(self, word: Sequence[int]) -> np.ndarray:
        """Sequential Kraus operator of decision sequence `word` (bits in index order)."""
        word = [int(b) for b in word]
        op = np.eye(self.dim, dtype=complex)
        for i in self.order:
            if i in self.frozen:
                if word[i - 1] != self.frozen[i]:
                    return np.zeros_like(op)
                continue
            known_bits = [word[j - 1] for j in self.known_positions(i)]
            op = self.measurement(i, known_bits)[word[i - 1]] @ op
        return op

    def words(self) -> Iterator[tuple[int, ...]]:
        info = sorted(self.info_indices)
        for values in itertools.product((0, 1), repeat=len(info)):
            word = [0] * self.N
            for index, value in self.frozen.items():
                word[index - 1] = value
            for index, value in zip(info, values):
                word[index - 1] = value
            yield tuple(word)

    def assemble(self) -> dict[str, np.ndarray]:
        """Product POVM elements keyed by the decoded word."""
        elements = {}
        for word in self.words():
            op = self.kraus_for(word)
            elements["".join(str(b) for b in word)] = op.conj().T @ op
        return elements

    def completeness_defect(self) -> float:
        total = sum(self.assemble().values())
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def success_probability(self, rho: np.ndarray, word: Sequence[int]) -> float:
        op = self.kraus_for(word)
        return float(np.trace(op @ rho @ op.conj().T).real)

    def codeword_state(self, word: Sequence[int]) -> np.ndarray:
        x = (np.asarray(word, dtype=np.int64) @ self._matrix) % 2
        return reduce(np.kron, [self._outputs[v] for v in x])

    def block_error(self) -> float:
        """1 - average success over uniformly random information bits."""
        words = list(self.words())
        success = sum(self.success_probability(self.codeword_state(w), w) for w in words)
        return float(1.0 - success / len(words))


def build_sc_povm(
    W: CqChannel,
    n: int,
    frozen: Mapping[int, int],
    side: Side = Side.AMPLITUDE,
    bit_reversal: bool = True,
) -> SuccessiveCancellationPOVM:
    return SuccessiveCancellationPOVM(W, n, frozen, side, bit_reversal)


def coherent_test(k0: np.ndarray, k1: np.ndarray) -> np.ndarray:
    """Operator on (outcome, system) sending |0>|psi> to |0> k0|psi> + |1> k1|psi>."""
    dim = k0.shape[0]
    op = np.zeros((2 * dim, 2 * dim), dtype=complex)
    op[:dim, :dim] = k0
    op[dim:, :dim] = k1
    return op


# ---------------------------------------------------------------------------
# Named-register state vector
# ---------------------------------------------------------------------------


class StateVector:
    """Pure state over named registers, one tensor axis per register."""

    def __init__(self, budget: int = MAX_STATEVECTOR_DIM):
        self.tensor = np.ones((), dtype=complex)
        self.names: list[str] = []
        self.budget = budget

    def _axes(self, names: Sequence[str]) -> list[int]:
        missing = [n for n in names if n not in self.names]
        if missing:
            raise ValidationError(f"unknown registers {missing}")
        return [self.names.index(n) for n in names]

    def _reserve(self, size: int) -> None:
        if size > self.budget:
            raise BudgetExceededError("protocol state vector", size, self.budget)

    def add(self, names: Sequence[str], vec: np.ndarray, dims: Sequence[int]) -> None:
        self._reserve(self.tensor.size * int(np.prod(dims)))
        self.tensor = np.multiply.outer(self.tensor, np.asarray(vec, dtype=complex).reshape(dims))
        self.names.extend(names)

    def apply(self, op: np.ndarray, names: Sequence[str]) -> None:
        axes = self._axes(names)
        k = len(axes)
        t = np.moveaxis(self.tensor, axes, range(k))
        shape = t.shape
        t = (op @ t.reshape(int(np.prod(shape[:k])), -1)).reshape(shape)
        self.tensor = np.moveaxis(t, range(k), axes)

    def apply_controlled(
        self,
        controls: Sequence[str],
        targets: Sequence[str],
        op_for: Callable[[tuple[int, ...]], Optional[np.ndarray]],
    ) -> None:
        """Apply op_for(control values) to the targets in each control branch."""
        axes = self._axes(list(controls) + list(targets))
        k = len(controls)
        t = np.ascontiguousarray(np.moveaxis(self.tensor, axes, range(len(axes))))
        for values in itertools.product(*(range(d) for d in t.shape[:k])):
            op = op_for(tuple(values))
            if op is None:
                continue
            block = t[values]
            shape = block.shape
            target_dim = int(np.prod(shape[: len(targets)]))
            t[values] = (op @ block.reshape(target_dim, -1)).reshape(shape)
        self.tensor = np.moveaxis(t, range(len(axes)), axes)

    def replace(
        self, name: str, iso: np.ndarray, new_names: Sequence[str], new_dims: Sequence[int]
    ) -> None:
        """Feed register `name` through an isometry; the outputs take its place in the order."""
        (axis,) = self._axes([name])
        rest = self.tensor.size // self.tensor.shape[axis]
        self._reserve(rest * iso.shape[0])
        t = np.moveaxis(self.tensor, axis, 0)
        rest_shape = t.shape[1:]
        t = (iso @ t.reshape(t.shape[0], -1)).reshape(tuple(new_dims) + rest_shape)
        k = len(new_dims)
        self.tensor = np.moveaxis(t, range(k), range(axis, axis + k))
        self.names[axis : axis + 1] = list(new_names)

    def vector(self, order: Sequence[str]) -> np.ndarray:
        if sorted(order) != sorted(self.names):
            raise ValidationError("order must list every register")
        return np.moveaxis(self.tensor, self._axes(order), range(len(order))).reshape(-1)

    def reduced(self, keep: Sequence[str]) -> np.ndarray:
        axes = self._axes(keep)
        t = np.moveaxis(self.tensor, axes, range(len(axes)))
        kept = int(np.prod(t.shape[: len(axes)]))
        m = t.reshape(kept, -1)
        return m @ m.conj().T


# ---------------------------------------------------------------------------
# Quantum protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialOutcome:
    frozen_bits: str
    trace_distance: float
    amplitude_overlap: float


@dataclass(frozen=True)
class ProtocolResult:
    output_state: DensityOperator
    ebit_trace_distance: float
    worst_trace_distance: float
    amplitude_overlap: float
    trials: tuple[TrialOutcome, ...]
    seed: int
    ebits: int
    decoder_error_bound: float


def decoder_error_bound(part: CodePartition, amp: PolarTable, phase: PolarTable) -> float:
    """sqrt(2 sum_{A u X} F_A) + sqrt(2 sum_{A u Z} F_P)."""
    f_a, f_p = amp.fidelities(), phase.fidelities()
    amp_sum = sum(f_a[i - 1] for i in part.A | part.X)
    phase_sum = sum(f_p[i - 1] for i in part.A | part.Z)
    return float(np.sqrt(2.0 * amp_sum) + np.sqrt(2.0 * phase_sum))


def _protocol_size(part: CodePartition, d_b: int, d_env: int) -> int:
    ancillas = 2 ** (len(part.A) + len(part.B) + len(part.A | part.Z))
    return ancillas * (2 * d_b * d_env) ** part.N


def _prepare_inputs(sv: StateVector, part: CodePartition, u: np.ndarray) -> None:
    for i in range(1, part.N + 1):
        role = part.role(i)
        if role == "A":
            sv.add([f"ref{i}", f"q{i}"], BELL, (2, 2))
        elif role == "B":
            sv.add([f"e{i}", f"q{i}"], BELL, (2, 2))
        elif role == "Z":
            sv.add([f"q{i}"], basis_vector(int(u[i - 1]), 2), (2,))
        else:
            sv.add([f"q{i}"], HADAMARD @ basis_vector(int(u[i - 1]), 2), (2,))


def _send(sv: StateVector, n: int, encoder: np.ndarray, iso: Isometry, d_env: int) -> None:
    N = 2**n
    sv.apply(encoder, [f"q{j}" for j in range(1, N + 1)])
    d_b = iso.out_dims[0]
    for j in range(1, N + 1):
        sv.replace(f"q{j}", iso.matrix, [f"b{j}", f"r{j}"], (d_b, d_env))


def _amplitude_decode(
    sv: StateVector, part: CodePartition, povm: SuccessiveCancellationPOVM, u
) -> None:
    """V_A: decide u_1..u_N coherently into c_1..c_N."""
    outputs = [f"b{j}" for j in range(1, part.N + 1)]
    for i in range(1, part.N + 1):
        sv.add([f"c{i}"], basis_vector(0, 2), (2,))
        role = part.role(i)
        if role == "Z":
            if u[i - 1]:
                sv.apply(PAULI_X, [f"c{i}"])
        elif role == "B":
            sv.apply(CNOT, [f"e{i}", f"c{i}"])
        else:
            past = [f"c{j}" for j in range(1, i)]

            def op_for(values, i=i):
                return coherent_test(*povm.measurement(i, values))

            sv.apply_controlled(past, [f"c{i}"] + outputs, op_for)


def _phase_decode(
    sv: StateVector, part: CodePartition, povm: SuccessiveCancellationPOVM, u
) -> dict:
    """V_P: decide the phases x_N..x_1; returns where each decided phase lives."""
    N = part.N
    targets = [name for j in range(1, N + 1) for name in (f"b{j}", f"c{j}")]
    source: dict[int, int | str] = {}
    for i in part.B:
        sv.apply(HADAMARD, [f"e{i}"])
    for i in range(N, 0, -1):
        role = part.role(i)
        if role == "X":
            source[i] = int(u[i - 1])
            continue
        if role == "B":
            source[i] = f"e{i}"
            continue
        future = list(range(i + 1, N + 1))
        registers = [source[j] for j in future if isinstance(source[j], str)]

        def op_for(values, i=i, future=future):
            it = iter(values)
            bits = [next(it) if isinstance(source[j], str) else source[j] for j in future]
            return coherent_test(*povm.measurement(i, bits))

        sv.add([f"p{i}"], basis_vector(0, 2), (2,))
        sv.apply_controlled(registers, [f"p{i}"] + targets, op_for)
        source[i] = f"p{i}"
    return source


def _single_run(
    ch: QubitChannelSpec,
    n: int,
    part: CodePartition,
    u: np.ndarray,
    amp_povm: SuccessiveCancellationPOVM,
    phase_povm: SuccessiveCancellationPOVM,
    encoder: np.ndarray,
) -> tuple[np.ndarray, float, float]:
    N = part.N
    iso = ch.dilation()
    d_env = iso.matrix.shape[0] // ch.kraus.d_out
    flat = Isometry(iso.matrix, (ch.kraus.d_out, d_env), ("B", "R"))
    cs = [f"c{j}" for j in range(1, N + 1)]

    sv = StateVector()
    _prepare_inputs(sv, part, u)
    ideal = StateVector()
    _prepare_inputs(ideal, part, u)
    for j in range(1, N + 1):
        ideal.add([f"c{j}"], basis_vector(0, 2), (2,))
        ideal.apply(CNOT, [f"q{j}", f"c{j}"])

    _send(sv, n, encoder, flat, d_env)
    _send(ideal, n, encoder, flat, d_env)
    _amplitude_decode(sv, part, amp_povm, u)
    order = list(ideal.names)
    overlap = float(abs(np.vdot(ideal.vector(order), sv.vector(order))))

    sv.apply(encoder, cs)
    source = _phase_decode(sv, part, phase_povm, u)
    sv.apply(encoder.conj().T, cs)
    for i in range(1, N + 1):
        src = source[i]
        if isinstance(src, str):
            sv.apply(CZ, [src, f"c{i}"])
        elif src:
            sv.apply(PAULI_Z, [f"c{i}"])
    for i in sorted(part.A):
        sv.apply(HADAMARD, [f"p{i}"])

    if not part.A:
        return np.ones((1, 1), dtype=complex), 0.0, overlap
    keep = [name for i in sorted(part.A) for name in (f"ref{i}", f"p{i}")]
    rho = sv.reduced(keep)
    target = reduce(np.kron, [np.outer(BELL, BELL.conj())] * len(part.A))
    return rho, trace_distance(rho, target), overlap


def run_quantum_protocol(
    ch: QubitChannelSpec,
    n: int,
    part: CodePartition,
    frozen_seed: int,
    trials: int = 1,
    bit_reversal: bool = True,
) -> ProtocolResult:
    """
    Simulate encoding, transmission and both coherent decoders, then score the ebits.

    Args:
        ch: The qubit channel.
        n: Recursion depth; the state vector limits this to n <= 2 in practice.
        part: A/X/Z/B partition with matching n.
        frozen_seed: Seed for the uniformly random frozen bits of the X and Z indices.
        trials: Number of frozen-bit choices to average over.
        bit_reversal: Transform convention, matching the tables behind `part`.

    Returns:
        ProtocolResult with the mean and worst trace distance to ideal ebits.
    """
    if part.n != n:
        raise ValidationError(f"partition is for n={part.n}, run asked for n={n}", field="n")
    if trials < 1:
        raise ValidationError(f"need at least one trial, got {trials}", field="trials")
    induced = induce_all(ch)
    iso = ch.dilation()
    d_env = iso.matrix.shape[0] // ch.kraus.d_out
    size = _protocol_size(part, ch.kraus.d_out, d_env)
    if size > MAX_STATEVECTOR_DIM:
        raise BudgetExceededError(f"quantum protocol at N={part.N}", size, MAX_STATEVECTOR_DIM)

    amp_povm = SuccessiveCancellationPOVM(induced.w_a, n, {}, Side.AMPLITUDE, bit_reversal)
    phase_povm = SuccessiveCancellationPOVM(induced.w_p, n, {}, Side.PHASE, bit_reversal)
    encoder = build_encoder(n, bit_reversal).matrix
    amp_table = exact_table(induced.w_a, n, Side.AMPLITUDE, bit_reversal)
    phase_table = exact_table(induced.w_p, n, Side.PHASE, bit_reversal)

    rng = np.random.default_rng(frozen_seed)
    outcomes, states = [], []
    for trial in range(trials):
        u = rng.integers(0, 2, size=part.N)
        rho, distance, overlap = _single_run(ch, n, part, u, amp_povm, phase_povm, encoder)
        frozen_bits = "".join(str(int(u[i - 1])) for i in sorted(part.X | part.Z))
        outcomes.append(TrialOutcome(frozen_bits, distance, overlap))
        states.append(rho)
        logger.debug("trial %d frozen=%s distance=%.3e", trial, frozen_bits, distance)

    mean_state = sum(states) / len(states)
    ebits = len(part.A)
    labels = tuple(f"{kind}{i}" for i in sorted(part.A) for kind in ("ref", "p")) or ("I",)
    dims = (2,) * (2 * ebits) if ebits else (1,)
    return ProtocolResult(
        output_state=DensityOperator(mean_state, dims, labels),
        ebit_trace_distance=float(np.mean([o.trace_distance for o in outcomes])),
        worst_trace_distance=float(max(o.trace_distance for o in outcomes)),
        amplitude_overlap=float(np.mean([o.amplitude_overlap for o in outcomes])),
        trials=tuple(outcomes),
        seed=frozen_seed,
        ebits=ebits,
        decoder_error_bound=decoder_error_bound(part, amp_table, phase_table),
    )


# ---------------------------------------------------------------------------
# Private protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SecurityChainReport:
    """Each quantity bounds the previous one from above."""

    leakage: float
    info_sum: float
    fidelity_sum: float
    phase_surrogate_sum: float
    phase_bound: float

    @property
    def links(self) -> tuple[float, ...]:
        return (
            self.leakage,
            self.info_sum,
            self.fidelity_sum,
            self.phase_surrogate_sum,
            self.phase_bound,
        )

    def holds(self, tol: float = TEST_TOL) -> bool:
        values = self.links
        return all(a <= b + tol for a, b in zip(values, values[1:]))


@dataclass(frozen=True)
class PrivateProtocolResult:
    block_error: float
    worst_block_error: float
    block_error_bound: float
    leakage: float
    chain: SecurityChainReport
    trial_errors: tuple[float, ...]
    seed: int


def _leakage(w_e: CqChannel, n: int, secret: frozenset[int], matrix: np.ndarray) -> float:
    """I(U_A; E^N) with every input bit uniform."""
    N = 2**n
    outputs = [w_e.zero.matrix, w_e.one.matrix]
    dim = outputs[0].shape[0] ** N
    if dim > MAX_DENSITY_DIM:
        raise BudgetExceededError(f"eavesdropper state at N={N}", dim, MAX_DENSITY_DIM)
    secret_pos = [i - 1 for i in sorted(secret)]
    by_secret: dict[tuple[int, ...], np.ndarray] = {}
    for word in itertools.product((0, 1), repeat=N):
        x = (np.asarray(word, dtype=np.int64) @ matrix) % 2
        key = tuple(word[p] for p in secret_pos)
        state = reduce(np.kron, [outputs[v] for v in x])
        by_secret[key] = by_secret.get(key, 0) + state
    per_secret = [m / 2 ** (N - len(secret_pos)) for m in by_secret.values()]
    average = sum(per_secret) / len(per_secret)
    conditional = np.mean([_entropy(m) for m in per_secret])
    return float(max(0.0, _entropy(average) - conditional))


def _entropy(m: np.ndarray) -> float:
    return von_neumann_entropy(DensityOperator(m, (m.shape[0],), ("E",)))


def security_chain(
    ch: QubitChannelSpec,
    preproc: Preprocessor,
    n: int,
    part: CodePartition,
    leakage: float,
    bit_reversal: bool = True,
) -> SecurityChainReport:
    induced = induce_private(ch, preproc)
    eve = exact_table(induced.w_e_bar, n, Side.RESERVOIR, bit_reversal)
    phase = exact_table(induced.w_p_bar, n, Side.PHASE, bit_reversal)
    secret = [i - 1 for i in sorted(part.A)]
    f_e, i_e, f_p = eve.exact_F[secret], eve.exact_I[secret], phase.exact_F[secret]
    return SecurityChainReport(
        leakage=leakage,
        info_sum=float(np.sum(i_e)),
        fidelity_sum=float(np.sum(np.sqrt(np.clip(1.0 - f_e**2, 0.0, None)))),
        phase_surrogate_sum=float(np.sum(np.sqrt(1.0 - np.maximum(0.0, 1.0 - 2.0 * f_p) ** 2))),
        phase_bound=float(np.sum(2.0 * np.sqrt(f_p))),
    )


def run_private_protocol(
    ch: QubitChannelSpec,
    preproc: Preprocessor,
    n: int,
    part: CodePartition,
    trials: int = 1,
    seed: int = 0,
    bit_reversal: bool = True,
) -> PrivateProtocolResult:
    """
    Exact reliability and leakage of the private scheme.

    Bob decodes A and X by successive cancellation with Z and B known (B carries the shared
    secret key). The block error averages over all information words for each sampled choice
    of the Z and B bits; the leakage is I(U_A; E^N) with all bits uniform.
    """
    if part.n != n:
        raise ValidationError(f"partition is for n={part.n}, run asked for n={n}", field="n")
    if trials < 1:
        raise ValidationError(f"need at least one trial, got {trials}", field="trials")
    induced = induce_private(ch, preproc)
    known = sorted(part.Z | part.B)
    rng = np.random.default_rng(seed)
    errors = []
    for trial in range(trials):
        values = rng.integers(0, 2, size=len(known))
        frozen = {i: int(v) for i, v in zip(known, values)}
        povm = SuccessiveCancellationPOVM(induced.w_a_bar, n, frozen, Side.AMPLITUDE, bit_reversal)
        errors.append(povm.block_error())
        logger.debug("private trial %d: block error %.3e", trial, errors[-1])

    amp = exact_table(induced.w_a_bar, n, Side.AMPLITUDE, bit_reversal)
    decoded = [i - 1 for i in sorted(part.A | part.X)]
    bound = float(np.sqrt(2.0 * np.sum(amp.exact_F[decoded])))
    matrix = PolarTransform(n, bit_reversal).matrix
    leakage = _leakage(induced.w_e_bar, n, part.A, matrix)
    chain = security_chain(ch, preproc, n, part, leakage, bit_reversal)
    if not chain.holds():
        logger.warning("security chain does not hold for %s: %s", ch.name, chain.links)
    return PrivateProtocolResult(
        block_error=float(np.mean(errors)),
        worst_block_error=float(max(errors)),
        block_error_bound=bound,
        leakage=leakage,
        chain=chain,
        trial_errors=tuple(float(e) for e in errors),
        seed=seed,
    )
