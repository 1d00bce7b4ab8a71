"""
Channel combining and splitting for binary-input cq channels.

Indices are one-based throughout. With G_N = B_N F^{(x)n} and x^N = u^N G_N:
- amplitude index i sees the past u_1..u_{i-1} as classical side information and
  averages the future bits,
- phase index i uses G_N^T, sees the future bits x_{i+1}..x_N and averages the past,
- reservoir index i is amplitude-style synthesis of the reservoir channel, so that it pairs
  with phase index i.

Phase index i has the same statistics as amplitude-style synthesis of W_P at N+1-i, so the
phase side of the fidelity recursion is the amplitude recursion read backwards.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, reduce
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from src.config import EIGEN_FLOOR, MAX_DENSITY_DIM, TEST_TOL
from src.errors import BudgetExceededError, InvariantViolation, ValidationError
from src.quantum.qcore import (
    CqChannel,
    DensityOperator,
    HybridBlock,
    HybridCqState,
    channel_fidelity,
    pair_statistics,
)

logger = logging.getLogger(__name__)

MAX_EXACT_N = 256

_KERNEL = np.array([[1, 0], [1, 1]], dtype=np.uint8)


class Side(str, Enum):
    AMPLITUDE = "amplitude"
    PHASE = "phase"
    RESERVOIR = "reservoir"


def kernel_power(n: int) -> np.ndarray:
    """F^{(x)n} over GF(2)."""
    out = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        out = np.kron(out, _KERNEL) % 2
    return out.astype(np.uint8)


def bit_reversal_permutation(n: int) -> np.ndarray:
    size = 2**n
    if n == 0:
        return np.zeros(1, dtype=np.int64)
    return np.array([int(format(k, f"0{n}b")[::-1], 2) for k in range(size)], dtype=np.int64)


@dataclass(frozen=True)
class PolarTransform:
    n: int
    bit_reversal: bool = True

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError(f"recursion depth must be non-negative, got {self.n}", field="n")

    @property
    def N(self) -> int:
        return 2**self.n

    @cached_property
    def matrix(self) -> np.ndarray:
        """G_N over GF(2); rows are permuted by B_N when bit_reversal is set."""
        g = kernel_power(self.n)
        if self.bit_reversal:
            g = g[bit_reversal_permutation(self.n)]
        return g

    def encode(self, u: np.ndarray) -> np.ndarray:
        return (np.asarray(u, dtype=np.int64) @ self.matrix) % 2

    def is_involution(self) -> bool:
        """G_N G_N = I over GF(2), so the encoder is its own inverse."""
        g = self.matrix.astype(np.int64)
        return bool(np.array_equal((g @ g) % 2, np.eye(self.N, dtype=np.int64)))


@dataclass(frozen=True)
class SynthesizedChannel:
    index: int
    side: Side
    info: float
    fidelity: float
    # None when only the statistics were requested
    channel: Optional[CqChannel] = None


def _all_bits(width: int) -> np.ndarray:
    # product yields one empty word at width 0
    bits = np.array(list(itertools.product((0, 1), repeat=width)), dtype=np.int64)
    return bits.reshape(2**width, width)


def _check_index(n: int, i: int) -> int:
    if n < 0:
        raise ValidationError(f"recursion depth must be non-negative, got {n}", field="n")
    size = 2**n
    if size > MAX_EXACT_N:
        raise ValidationError(f"exact synthesis supports N <= {MAX_EXACT_N}, got {size}", field="n")
    if not 1 <= i <= size:
        raise ValidationError(f"index must lie in [1, {size}], got {i}", field="i")
    return size


def _local_outputs(W: CqChannel, compress: bool) -> list[np.ndarray]:
    """
    The two output matrices, optionally restricted to the support of rho0 + rho1.

    Restriction is an isometry applied to every tensor factor, so I and F of all synthesized
    channels are unchanged.
    """
    if not isinstance(W.zero, DensityOperator):
        raise ValidationError("synthesis needs a cq channel with plain density outputs")
    outputs = [W.zero.matrix, W.one.matrix]
    if not compress:
        return outputs
    w, v = np.linalg.eigh(0.5 * (outputs[0] + outputs[1]))
    support = v[:, w > EIGEN_FLOOR]
    return [support.conj().T @ m @ support for m in outputs]


def _synthesize(
    W: CqChannel,
    n: int,
    i: int,
    matrix: np.ndarray,
    known_future: bool,
    side: Side,
    keep_states: bool,
) -> SynthesizedChannel:
    size = _check_index(n, i)
    outputs = _local_outputs(W, compress=not keep_states)
    local_dim = outputs[0].shape[0]
    block_dim = local_dim**size
    if block_dim > MAX_DENSITY_DIM:
        logger.warning("exact %s synthesis refused: block dim %d", side.value, block_dim)
        raise BudgetExceededError(
            f"exact {side.value} synthesis at N={size}", block_dim, MAX_DENSITY_DIM
        )

    target = i - 1
    past, future = list(range(target)), list(range(target + 1, size))
    known, hidden = (future, past) if known_future else (past, future)
    hidden_bits = _all_bits(len(hidden))
    weight = 2.0 ** -len(known)

    dims = W.zero.dims * size
    labels = tuple(f"{label}{j + 1}" for j in range(size) for label in W.zero.labels)

    info = fid = 0.0
    kept: tuple[list, list] = ([], [])
    for label_bits in _all_bits(len(known)):
        pair = []
        for bit in (0, 1):
            u = np.zeros((hidden_bits.shape[0], size), dtype=np.int64)
            u[:, known] = label_bits
            u[:, target] = bit
            u[:, hidden] = hidden_bits
            words = (u @ matrix) % 2
            block = sum(reduce(np.kron, [outputs[v] for v in word]) for word in words)
            pair.append(block / words.shape[0])
        block_info, block_fid = pair_statistics(pair[0], pair[1])
        info += weight * block_info
        fid += weight * block_fid
        if keep_states:
            label = "".join(str(b) for b in label_bits)
            for bit in (0, 1):
                state = DensityOperator(pair[bit], dims, labels)
                kept[bit].append(HybridBlock(label, weight, state))

    channel = None
    if keep_states:
        channel = CqChannel(
            (HybridCqState(tuple(kept[0])), HybridCqState(tuple(kept[1]))),
            name=f"{W.name}^({i})",
        )
    logger.debug("synthesized %s index %d/%d: I=%.6f F=%.6f", side.value, i, size, info, fid)
    return SynthesizedChannel(
        index=i,
        side=side,
        info=float(np.clip(info, 0.0, 1.0)),
        fidelity=0.0 if fid < EIGEN_FLOOR else float(min(1.0, fid)),
        channel=channel,
    )


def synthesize_amplitude(
    W: CqChannel, n: int, i: int, bit_reversal: bool = True, keep_states: bool = True
) -> SynthesizedChannel:
    """
    Synthesized amplitude channel W_N^{(i)}.

    Args:
        W: Base cq channel with density outputs.
        n: Recursion depth, N = 2^n.
        i: One-based index.
        bit_reversal: Use G_N = B_N F^{(x)n} instead of F^{(x)n}.
        keep_states: Return the two hybrid output states as well as I and F.

    Returns:
        SynthesizedChannel whose outputs are labeled by the past bits u_1..u_{i-1}.
    """
    matrix = PolarTransform(n, bit_reversal).matrix
    return _synthesize(W, n, i, matrix, False, Side.AMPLITUDE, keep_states)


def synthesize_phase(
    W_P: CqChannel, n: int, i: int, bit_reversal: bool = True, keep_states: bool = True
) -> SynthesizedChannel:
    """Synthesized phase channel: G_N^T, outputs labeled by the future bits x_{i+1}..x_N."""
    matrix = PolarTransform(n, bit_reversal).matrix.T
    return _synthesize(W_P, n, i, matrix, True, Side.PHASE, keep_states)


def synthesize_reservoir(
    W_R: CqChannel, n: int, i: int, bit_reversal: bool = True, keep_states: bool = True
) -> SynthesizedChannel:
    matrix = PolarTransform(n, bit_reversal).matrix
    return _synthesize(W_R, n, i, matrix, False, Side.RESERVOIR, keep_states)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolarTable:
    n: int
    side: Side
    f_bound: np.ndarray
    exact_I: Optional[np.ndarray] = None
    exact_F: Optional[np.ndarray] = None
    bit_reversal: bool = True

    @property
    def N(self) -> int:
        return 2**self.n

    @property
    def indices(self) -> np.ndarray:
        return np.arange(1, self.N + 1)

    @property
    def is_exact(self) -> bool:
        return self.exact_F is not None

    def fidelities(self) -> np.ndarray:
        """Exact F where available, the recursion bound otherwise."""
        return self.exact_F if self.exact_F is not None else self.f_bound

    def validate(self, tol: float = TEST_TOL) -> "PolarTable":
        columns = {"f_bound": self.f_bound, "exact_I": self.exact_I, "exact_F": self.exact_F}
        for name, values in columns.items():
            if values is None:
                continue
            if len(values) != self.N:
                raise InvariantViolation(
                    f"{self.side.value} table column {name} has {len(values)} rows, "
                    f"expected {self.N}"
                )
            if np.any(values < -tol) or np.any(values > 1 + tol):
                raise InvariantViolation(f"{self.side.value} table column {name} leaves [0, 1]")
        if self.exact_F is not None:
            excess = self.exact_F - self.f_bound
            worst = int(np.argmax(excess))
            if excess[worst] > tol:
                raise InvariantViolation(
                    f"{self.side.value} index {worst + 1}: exact F {self.exact_F[worst]:.12g} "
                    f"exceeds recursion bound {self.f_bound[worst]:.12g}"
                )
        return self


def _fidelity_recursion(f0: float, n: int) -> np.ndarray:
    """Per-index bounds in index order; the first branch is the most significant bit of i-1."""
    f = np.array([float(f0)])
    for _ in range(n):
        nxt = np.empty(2 * f.size)
        nxt[0::2] = 2.0 * f - f * f
        nxt[1::2] = f * f
        f = nxt
    return f


def _check_unit(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"must lie in [0, 1], got {value}", field=name)


def propagate_f_bounds(
    f0: float, n: int, side: Side = Side.AMPLITUDE, bit_reversal: bool = True
) -> PolarTable:
    """Upper bounds on F(W_N^{(i)}): minus branch f -> 2f - f^2, plus branch f -> f^2."""
    _check_unit(f0, "f0")
    bounds = _fidelity_recursion(f0, n)
    if side is Side.PHASE:
        bounds = bounds[::-1].copy()
    return PolarTable(n=n, side=side, f_bound=bounds, bit_reversal=bit_reversal)


def bounds_table(
    f0: float, n: int, side: Side = Side.AMPLITUDE, bit_reversal: bool = True
) -> PolarTable:
    return propagate_f_bounds(f0, n, side, bit_reversal)


def bec_evolve(p: float, n: int, bit_reversal: bool = True) -> PolarTable:
    """Exact fidelities of the polarized erasure channel; for the BEC the recursion is tight."""
    _check_unit(p, "p")
    f = _fidelity_recursion(p, n)
    return PolarTable(
        n=n,
        side=Side.AMPLITUDE,
        f_bound=f,
        exact_I=1.0 - f,
        exact_F=f.copy(),
        bit_reversal=bit_reversal,
    )


def exact_table(
    W: CqChannel, n: int, side: Side = Side.AMPLITUDE, bit_reversal: bool = True
) -> PolarTable:
    """
    Exact (I, F) for every index, with the recursion bounds alongside.

    Args:
        W: W_A for the amplitude side, W_P for the phase side, W_R for the reservoir side.
        n: Recursion depth.
        side: Which synthesis rule to apply.
        bit_reversal: Recorded on the table and passed to the transform.

    Returns:
        A validated PolarTable.
    """
    synthesize = {
        Side.AMPLITUDE: synthesize_amplitude,
        Side.PHASE: synthesize_phase,
        Side.RESERVOIR: synthesize_reservoir,
    }[side]
    rows = [synthesize(W, n, i, bit_reversal, keep_states=False) for i in range(1, 2**n + 1)]
    bounds = propagate_f_bounds(channel_fidelity(W), n, side, bit_reversal)
    table = PolarTable(
        n=n,
        side=side,
        f_bound=bounds.f_bound,
        exact_I=np.array([r.info for r in rows]),
        exact_F=np.array([r.fidelity for r in rows]),
        bit_reversal=bit_reversal,
    )
    return table.validate()


def default_threshold(N: int) -> float:
    """delta = 2^{-sqrt(N)}."""
    return float(2.0 ** -np.sqrt(N))


@dataclass(frozen=True)
class Classification:
    good: frozenset[int]
    bad: frozenset[int]
    threshold: float


def classify(table: PolarTable, threshold: float) -> Classification:
    """Index i is good iff its fidelity is strictly below the threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValidationError(f"threshold must lie in (0, 1), got {threshold}", field="threshold")
    good_mask = table.fidelities() < threshold
    indices = table.indices
    return Classification(
        good=frozenset(int(k) for k in indices[good_mask]),
        bad=frozenset(int(k) for k in indices[~good_mask]),
        threshold=threshold,
    )


# ---------------------------------------------------------------------------
# Random and extremal processes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MCResult:
    n: int
    samples: int
    seed: int
    threshold: float
    mean_f: float
    stderr_f: float
    fraction_below: float
    mean_info_proxy: float
    final_f: np.ndarray


def mc_polarization(
    W: CqChannel,
    n: int,
    samples: int,
    seed: int,
    threshold: Optional[float] = None,
    exact_prefix: int = 0,
) -> MCResult:
    """
    Sample the fidelity birth process along uniformly random branches.

    The first `exact_prefix` levels start from exact synthesized fidelities; the remaining
    levels follow the recursion bounds. The information proxy is 1 - F, which is exact for
    erasure channels.
    """
    if samples < 1:
        raise ValidationError(f"need at least one sample, got {samples}", field="samples")
    if not 0 <= exact_prefix <= n:
        raise ValidationError("exact prefix must lie in [0, n]", field="exact_prefix")
    rng = np.random.default_rng(seed)
    if exact_prefix:
        start = exact_table(W, exact_prefix).exact_F
        f = start[rng.integers(0, start.size, size=samples)]
    else:
        f = np.full(samples, channel_fidelity(W))
    branches = rng.integers(0, 2, size=(samples, n - exact_prefix))
    for level in range(branches.shape[1]):
        f = np.where(branches[:, level] == 1, 2.0 * f - f * f, f * f)
    if threshold is None:
        threshold = default_threshold(2**n)
    stderr = float(np.std(f, ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return MCResult(
        n=n,
        samples=samples,
        seed=seed,
        threshold=threshold,
        mean_f=float(np.mean(f)),
        stderr_f=stderr,
        fraction_below=float(np.mean(f < threshold)),
        mean_info_proxy=float(np.mean(1.0 - f)),
        final_f=f,
    )


@dataclass(frozen=True)
class ExtremalProcessSample:
    """Branch bit 0 squares the fidelity, branch bit 1 maps f to 2f - f^2."""

    branch_bits: tuple[int, ...]
    trajectory: tuple[float, ...]

    def __post_init__(self):
        if len(self.trajectory) != len(self.branch_bits) + 1:
            raise ValidationError("trajectory must be one longer than the branch bits")


def _extremal_step(f: float, bit: int) -> float:
    return 2.0 * f - f * f if bit else f * f


def extremal_process(f0: float, branch_bits: tuple[int, ...]) -> ExtremalProcessSample:
    _check_unit(f0, "f0")
    trajectory = [float(f0)]
    for bit in branch_bits:
        if bit not in (0, 1):
            raise ValidationError(f"branch bits must be 0 or 1, got {bit}", field="branch_bits")
        trajectory.append(_extremal_step(trajectory[-1], bit))
    return ExtremalProcessSample(tuple(int(b) for b in branch_bits), tuple(trajectory))


def extremal_threshold(branch_bits: tuple[int, ...]) -> float:
    """Initial fidelity at which this realization ends at exactly 1/2."""
    if not branch_bits:
        return 0.5

    def gap(f0: float) -> float:
        return extremal_process(f0, branch_bits).trajectory[-1] - 0.5

    return float(brentq(gap, 0.0, 1.0, xtol=1e-14))


def branch_bits_for_index(i: int, n: int) -> tuple[int, ...]:
    """Extremal-process branch bits realizing amplitude index i (minus branch is bit 1)."""
    bits = format(i - 1, f"0{n}b") if n else ""
    return tuple(1 - int(b) for b in bits)
