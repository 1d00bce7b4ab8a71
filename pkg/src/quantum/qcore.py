"""
Dense finite-dimensional quantum primitives.

States, channels, entropies, fidelities and subsystem algebra for everything else in
`src.quantum`. Subsystems always carry explicit string labels; nothing is reordered
implicitly. Hermitian eigen-decomposition is the primitive for square roots and entropies,
singular values give trace norms. Entropies are in bits.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from src.config import EIGEN_FLOOR, KRAUS_TRUNCATION, STRUCTURAL_TOL
from src.errors import ValidationError

logger = logging.getLogger(__name__)

Dims = tuple[int, ...]
Labels = tuple[str, ...]

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _check_layout(dims: Dims, labels: Labels, size: int) -> None:
    if len(dims) != len(labels):
        raise ValidationError(f"{len(dims)} dims but {len(labels)} labels")
    if len(set(labels)) != len(labels):
        raise ValidationError(f"duplicate subsystem labels {labels}")
    if any(d < 1 for d in dims):
        raise ValidationError(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims, dtype=np.int64)) != size:
        raise ValidationError(f"dims {dims} do not multiply to {size}")


@dataclass(frozen=True)
class PureState:
    vector: np.ndarray
    dims: Dims
    labels: Labels

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=complex).reshape(-1)
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "labels", tuple(self.labels))
        _check_layout(self.dims, self.labels, vec.size)
        norm = float(np.vdot(vec, vec).real)
        if abs(norm - 1.0) > 1e-12 * max(1.0, vec.size) ** 0.5 + 1e-12:
            raise ValidationError(f"pure state has squared norm {norm:.3e}, expected 1")

    @property
    def matrix(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def to_density(self) -> "DensityOperator":
        return DensityOperator(self.matrix, self.dims, self.labels)


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray
    dims: Dims
    labels: Labels

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"density operator must be square, got shape {mat.shape}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "labels", tuple(self.labels))
        _check_layout(self.dims, self.labels, mat.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self, tol: float = STRUCTURAL_TOL) -> "DensityOperator":
        """Check Hermiticity, positivity and unit trace; returns self for chaining."""
        mat = self.matrix
        if np.max(np.abs(mat - mat.conj().T), initial=0.0) > tol:
            raise ValidationError("density operator is not Hermitian")
        trace = np.trace(mat).real
        if abs(trace - 1.0) > tol:
            raise ValidationError(f"density operator has trace {trace:.12g}")
        lowest = np.linalg.eigvalsh(_hermitize(mat))[0]
        if lowest < -tol:
            raise ValidationError(f"density operator has negative eigenvalue {lowest:.3e}")
        return self


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map as a list of d_out x d_in Kraus matrices."""

    kraus_ops: tuple[np.ndarray, ...]
    tol: float = STRUCTURAL_TOL

    def __post_init__(self):
        ops = tuple(np.atleast_2d(np.asarray(k, dtype=complex)) for k in self.kraus_ops)
        if not ops:
            raise ValidationError("channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ValidationError("Kraus operators have inconsistent shapes")
        object.__setattr__(self, "kraus_ops", ops)
        defect = completeness_defect(ops)
        if defect > self.tol:
            raise ValidationError(
                f"Kraus operators are not trace preserving: max |sum K^dag K - I| = {defect:.3e}"
            )

    @property
    def d_in(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus_ops[0].shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus_ops)


def completeness_defect(ops: Sequence[np.ndarray]) -> float:
    total = sum(k.conj().T @ k for k in ops)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


@dataclass(frozen=True)
class Isometry:
    """V mapping d_in into the labeled product space out_dims (channel output first)."""

    matrix: np.ndarray
    out_dims: Dims
    out_labels: Labels

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "out_dims", tuple(int(d) for d in self.out_dims))
        object.__setattr__(self, "out_labels", tuple(self.out_labels))
        _check_layout(self.out_dims, self.out_labels, mat.shape[0])
        gram = mat.conj().T @ mat
        if np.max(np.abs(gram - np.eye(mat.shape[1]))) > STRUCTURAL_TOL:
            raise ValidationError("matrix is not an isometry (V^dag V != I)")

    @property
    def d_in(self) -> int:
        return self.matrix.shape[1]

    def apply_vector(self, vec: np.ndarray) -> PureState:
        return PureState(self.matrix @ vec, self.out_dims, self.out_labels)

    def apply(self, rho: np.ndarray) -> DensityOperator:
        out = self.matrix @ rho @ self.matrix.conj().T
        return DensityOperator(out, self.out_dims, self.out_labels)


@dataclass(frozen=True)
class HybridBlock:
    label: str
    weight: float
    state: DensityOperator


@dataclass(frozen=True)
class HybridCqState:
    """Block-diagonal cq state: orthogonal classical labels, one density block per label."""

    blocks: tuple[HybridBlock, ...]

    def __post_init__(self):
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValidationError("hybrid state needs at least one block")
        labels = [b.label for b in blocks]
        if len(set(labels)) != len(labels):
            raise ValidationError("hybrid state labels must be distinct")
        if any(b.weight < -STRUCTURAL_TOL for b in blocks):
            raise ValidationError("hybrid state weights must be non-negative")
        total = sum(b.weight for b in blocks)
        if abs(total - 1.0) > STRUCTURAL_TOL:
            raise ValidationError(f"hybrid state weights sum to {total:.12g}")
        dims = blocks[0].state.dims
        if any(b.state.dims != dims for b in blocks):
            raise ValidationError("hybrid state blocks must share dims")

    @property
    def dims(self) -> Dims:
        return self.blocks[0].state.dims

    @property
    def labels(self) -> Labels:
        return self.blocks[0].state.labels

    def by_label(self) -> dict[str, HybridBlock]:
        return {b.label: b for b in self.blocks}

    def to_density(self, register: str = "U") -> DensityOperator:
        """Expand into an explicit block-diagonal operator with a classical register first."""
        width = len(self.blocks[0].label)
        if any(len(b.label) != width for b in self.blocks):
            raise ValidationError("labels must be bit strings of one length to expand")
        if width == 0:
            return self.blocks[0].state
        size = 2**width
        d = self.blocks[0].state.dim
        mat = np.zeros((size * d, size * d), dtype=complex)
        for block in self.blocks:
            k = int(block.label, 2)
            mat[k * d : (k + 1) * d, k * d : (k + 1) * d] = block.weight * block.state.matrix
        return DensityOperator(mat, (size,) + self.dims, (register,) + self.labels)


CqOutput = Union[DensityOperator, HybridCqState]
State = Union[DensityOperator, PureState]


@dataclass(frozen=True)
class CqChannel:
    """Binary-input cq channel: bit b is mapped to outputs[b]."""

    outputs: tuple[CqOutput, CqOutput]
    name: str = ""

    def __post_init__(self):
        zero, one = self.outputs
        if type(zero) is not type(one):
            raise ValidationError("cq channel outputs must have the same kind")
        if zero.dims != one.dims:
            raise ValidationError(f"cq channel outputs differ in dims: {zero.dims} vs {one.dims}")

    @property
    def zero(self) -> CqOutput:
        return self.outputs[0]

    @property
    def one(self) -> CqOutput:
        return self.outputs[1]


# ---------------------------------------------------------------------------
# Spectral helpers
# ---------------------------------------------------------------------------


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(_hermitize(m))


def _sqrt_from_eig(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    root = np.sqrt(np.where(w > EIGEN_FLOOR, w, 0.0))
    return (v * root) @ v.conj().T


def _entropy_from_eigenvalues(w: np.ndarray) -> float:
    w = w[w > 0.0]
    return float(-np.sum(w * np.log2(w)))


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = _eig(m)
    if w[0] < -STRUCTURAL_TOL:
        raise ValidationError(f"operator is not positive semidefinite (eigenvalue {w[0]:.3e})")
    return _sqrt_from_eig(w, v)


def psd_pinv_sqrt(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse square root on the support of m, plus the projector onto its kernel."""
    w, v = _eig(m)
    support = w > EIGEN_FLOOR
    inv_root = np.where(support, 1.0 / np.sqrt(np.where(support, w, 1.0)), 0.0)
    kernel = v[:, ~support]
    return (v * inv_root) @ v.conj().T, kernel @ kernel.conj().T


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def _floor_fidelity(f: float) -> float:
    """Fidelities below EIGEN_FLOOR are rounding noise from orthogonal supports."""
    return 0.0 if f < EIGEN_FLOOR else float(min(1.0, f))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * trace_norm(a - b)


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def shannon_entropy(probs: Iterable[float]) -> float:
    arr = np.asarray(list(probs), dtype=float)
    return _entropy_from_eigenvalues(arr)


# ---------------------------------------------------------------------------
# Fidelity, entropy, Holevo information
# ---------------------------------------------------------------------------


def _as_matrix(s: Union[State, np.ndarray]) -> np.ndarray:
    if isinstance(s, (DensityOperator, PureState)):
        return s.matrix
    return np.asarray(s, dtype=complex)


def fidelity(a: State, b: State) -> float:
    """||sqrt(a) sqrt(b)||_1, symmetric; |<a|b>| for pure inputs."""
    if a.dims != b.dims:
        raise ValidationError(f"fidelity of mismatched dims {a.dims} vs {b.dims}")
    if isinstance(a, PureState) and isinstance(b, PureState):
        return _floor_fidelity(abs(np.vdot(a.vector, b.vector)))
    root_a = psd_sqrt(_as_matrix(a))
    root_b = psd_sqrt(_as_matrix(b))
    return _floor_fidelity(trace_norm(root_a @ root_b))


def hybrid_fidelity(a: HybridCqState, b: HybridCqState) -> float:
    """Blockwise fidelity: sum over labels of sqrt(w_a w_b) F(block_a, block_b)."""
    blocks_a, blocks_b = a.by_label(), b.by_label()
    if set(blocks_a) != set(blocks_b):
        raise ValidationError("hybrid fidelity needs identical label sets")
    total = 0.0
    for label, block_a in blocks_a.items():
        block_b = blocks_b[label]
        total += np.sqrt(block_a.weight * block_b.weight) * fidelity(block_a.state, block_b.state)
    return float(min(1.0, total))


def von_neumann_entropy(rho: Union[State, HybridCqState]) -> float:
    if isinstance(rho, PureState):
        return 0.0
    if isinstance(rho, HybridCqState):
        weights = [b.weight for b in rho.blocks]
        inner = sum(b.weight * von_neumann_entropy(b.state) for b in rho.blocks if b.weight > 0)
        return shannon_entropy(weights) + inner
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(_hermitize(_as_matrix(rho))))


def _mixture(a: CqOutput, b: CqOutput) -> CqOutput:
    if isinstance(a, DensityOperator):
        return DensityOperator(0.5 * (a.matrix + b.matrix), a.dims, a.labels)
    blocks_a, blocks_b = a.by_label(), b.by_label()
    merged = []
    for label in sorted(set(blocks_a) | set(blocks_b)):
        parts = [blk for blk in (blocks_a.get(label), blocks_b.get(label)) if blk is not None]
        weight = 0.5 * sum(blk.weight for blk in parts)
        if weight <= 0.0:
            continue
        mat = sum(blk.weight * blk.state.matrix for blk in parts) / (2.0 * weight)
        merged.append(HybridBlock(label, weight, DensityOperator(mat, a.dims, a.labels)))
    return HybridCqState(tuple(merged))


def holevo_information(W: CqChannel) -> float:
    """Symmetric Holevo information H(avg) - (H(rho0) + H(rho1)) / 2, clipped to [0, 1]."""
    value = von_neumann_entropy(_mixture(W.zero, W.one)) - 0.5 * (
        von_neumann_entropy(W.zero) + von_neumann_entropy(W.one)
    )
    return float(np.clip(value, 0.0, 1.0))


def channel_fidelity(W: CqChannel) -> float:
    if isinstance(W.zero, HybridCqState):
        return hybrid_fidelity(W.zero, W.one)
    return fidelity(W.zero, W.one)


def pair_statistics(r0: np.ndarray, r1: np.ndarray) -> tuple[float, float]:
    """(Holevo information, fidelity) of an equiprobable pair, sharing eigen-decompositions."""
    w0, v0 = _eig(r0)
    w1, v1 = _eig(r1)
    avg = _entropy_from_eigenvalues(np.linalg.eigvalsh(_hermitize(0.5 * (r0 + r1))))
    info = avg - 0.5 * (_entropy_from_eigenvalues(w0) + _entropy_from_eigenvalues(w1))
    fid = _floor_fidelity(trace_norm(_sqrt_from_eig(w0, v0) @ _sqrt_from_eig(w1, v1)))
    return info, fid


def cq_statistics(W: CqChannel) -> tuple[float, float]:
    """(I, F) of a cq channel in one pass; blockwise for hybrid outputs with equal weights."""
    if isinstance(W.zero, DensityOperator):
        info, fid = pair_statistics(W.zero.matrix, W.one.matrix)
        return float(np.clip(info, 0.0, 1.0)), float(min(1.0, fid))
    blocks_a, blocks_b = W.zero.by_label(), W.one.by_label()
    equal = set(blocks_a) == set(blocks_b) and all(
        abs(blocks_a[k].weight - blocks_b[k].weight) <= STRUCTURAL_TOL for k in blocks_a
    )
    if not equal:
        return holevo_information(W), channel_fidelity(W)
    info = fid = 0.0
    for label, block in blocks_a.items():
        i_block, f_block = pair_statistics(block.state.matrix, blocks_b[label].state.matrix)
        info += block.weight * i_block
        fid += block.weight * f_block
    return float(np.clip(info, 0.0, 1.0)), float(min(1.0, fid))


# ---------------------------------------------------------------------------
# Dilations and subsystem algebra
# ---------------------------------------------------------------------------


def minimal_kraus(ops: Sequence[np.ndarray]) -> tuple[np.ndarray, ...]:
    """Smallest Kraus set for the same channel; singular values below 1e-12 are dropped."""
    d_out, d_in = ops[0].shape
    stacked = np.stack([k.reshape(-1) for k in ops], axis=1)
    u, s, _ = np.linalg.svd(stacked, full_matrices=False)
    keep = s > KRAUS_TRUNCATION
    return tuple((u[:, j] * s[j]).reshape(d_out, d_in) for j in np.flatnonzero(keep))


def stinespring(
    ch: KrausChannel,
    minimal: bool = True,
    labels: tuple[str, str] = ("B", "R"),
) -> Isometry:
    """
    Isometric extension V|psi> = sum_k K_k|psi> (x) |k>, output ordered (B, environment).

    With minimal=False the Kraus list is used as given, so the environment basis keeps
    whatever structure the caller put into it (for example a shield/eavesdropper split).
    """
    ops = minimal_kraus(ch.kraus_ops) if minimal else ch.kraus_ops
    d_env = len(ops)
    mat = np.zeros((ch.d_out * d_env, ch.d_in), dtype=complex)
    for k, op in enumerate(ops):
        mat[k::d_env, :] = op
    logger.debug("stinespring: d_in=%d d_out=%d d_env=%d", ch.d_in, ch.d_out, d_env)
    return Isometry(mat, (ch.d_out, d_env), labels)


def _resolve(labels: Labels, wanted: Iterable[str]) -> list[int]:
    wanted = list(wanted)
    unknown = [w for w in wanted if w not in labels]
    if unknown:
        raise ValidationError(f"unknown subsystem labels {unknown}; have {labels}")
    return [i for i, label in enumerate(labels) if label in wanted]


def partial_trace(s: State, keep: Iterable[str]) -> DensityOperator:
    """Reduced state on `keep`; kept subsystems stay in their original order."""
    keep_idx = _resolve(s.labels, keep)
    dims, labels = s.dims, s.labels
    kept_dims = tuple(dims[i] for i in keep_idx)
    kept_labels = tuple(labels[i] for i in keep_idx)
    size = int(np.prod(kept_dims, dtype=np.int64))
    if isinstance(s, PureState):
        traced = [i for i in range(len(dims)) if i not in keep_idx]
        t = s.vector.reshape(dims).transpose(keep_idx + traced).reshape(size, -1)
        return DensityOperator(t @ t.conj().T, kept_dims, kept_labels)
    k = len(dims)
    t = s.matrix.reshape(dims + dims)
    row = list(range(k))
    col = [i if i not in keep_idx else k + i for i in range(k)]
    out = keep_idx + [k + i for i in keep_idx]
    reduced = np.einsum(t, row + col, out)
    return DensityOperator(reduced.reshape(size, size), kept_dims, kept_labels)


def permute(s: State, order: Sequence[str]) -> State:
    """Reorder subsystems explicitly; `order` must list every label once."""
    if sorted(order) != sorted(s.labels):
        raise ValidationError(f"permutation {tuple(order)} does not match labels {s.labels}")
    perm = [s.labels.index(label) for label in order]
    dims = tuple(s.dims[i] for i in perm)
    if isinstance(s, PureState):
        vec = s.vector.reshape(s.dims).transpose(perm).reshape(-1)
        return PureState(vec, dims, tuple(order))
    k = len(s.dims)
    mat = s.matrix.reshape(s.dims + s.dims).transpose(perm + [k + i for i in perm])
    return DensityOperator(mat.reshape(s.matrix.shape), dims, tuple(order))


def apply_local(s: State, op: np.ndarray, label: str) -> State:
    """Apply a unitary to one labeled subsystem."""
    (axis,) = _resolve(s.labels, [label])
    if isinstance(s, PureState):
        t = np.moveaxis(np.tensordot(op, s.vector.reshape(s.dims), axes=([1], [axis])), 0, axis)
        return PureState(t.reshape(-1), s.dims, s.labels)
    k = len(s.dims)
    t = s.matrix.reshape(s.dims + s.dims)
    t = np.moveaxis(np.tensordot(op, t, axes=([1], [axis])), 0, axis)
    t = np.moveaxis(np.tensordot(op.conj(), t, axes=([1], [k + axis])), 0, k + axis)
    return DensityOperator(t.reshape(s.matrix.shape), s.dims, s.labels)


def measure_basis(s: State, label: str, basis: str = "amplitude") -> DensityOperator:
    """
    Measure one qubit subsystem and keep the outcome as a classical register in place.

    basis="amplitude" is the computational basis, basis="phase" the conjugate basis
    |x~> = (|0> + (-1)^x |1>)/sqrt(2); outcome x is stored as |x>.
    """
    if basis not in ("amplitude", "phase"):
        raise ValidationError(f"unknown basis {basis!r}")
    state = s.to_density() if isinstance(s, PureState) else s
    if basis == "phase":
        state = apply_local(state, HADAMARD, label)
    (axis,) = _resolve(state.labels, [label])
    d = state.dims[axis]
    k = len(state.dims)
    t = state.matrix.reshape(state.dims + state.dims)
    shape = [1] * (2 * k)
    shape[axis], shape[k + axis] = d, d
    t = t * np.eye(d).reshape(shape)
    return DensityOperator(t.reshape(state.matrix.shape), state.dims, state.labels)


def _as_state(s: Union[State, HybridCqState]) -> State:
    return s.to_density() if isinstance(s, HybridCqState) else s


def entropy_of(s: Union[State, HybridCqState], parts: Iterable[str]) -> float:
    parts = list(parts)
    if not parts:
        return 0.0
    return von_neumann_entropy(partial_trace(_as_state(s), parts))


def conditional_entropy(
    s: Union[State, HybridCqState], target: Iterable[str], given: Iterable[str] = ()
) -> float:
    """H(target | given) = H(target given) - H(given)."""
    target, given = list(target), list(given)
    return entropy_of(s, target + given) - entropy_of(s, given)


def mutual_information(
    s: Union[State, HybridCqState], first: Iterable[str], second: Iterable[str]
) -> float:
    """I(first; second) = H(first) + H(second) - H(first second)."""
    first, second = list(first), list(second)
    return entropy_of(s, first) + entropy_of(s, second) - entropy_of(s, first + second)


# ---------------------------------------------------------------------------
# Standard states and random instances
# ---------------------------------------------------------------------------


def basis_vector(index: int, dim: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1.0
    return vec


def maximally_entangled(dim: int, labels: tuple[str, str] = ("A", "A'")) -> PureState:
    vec = np.eye(dim, dtype=complex).reshape(-1) / np.sqrt(dim)
    return PureState(vec, (dim, dim), labels)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_pure_state(dims: Dims, labels: Labels, rng: np.random.Generator) -> PureState:
    size = int(np.prod(dims))
    vec = rng.normal(size=size) + 1j * rng.normal(size=size)
    return PureState(vec / np.linalg.norm(vec), dims, labels)


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_kraus_channel(
    d_in: int, d_out: int, n_kraus: int, rng: np.random.Generator
) -> KrausChannel:
    """Channel from the first d_in columns of a Haar unitary on d_out * n_kraus."""
    dim = d_out * n_kraus
    if dim < d_in:
        raise ValidationError("output times Kraus count must be at least the input dimension")
    iso = random_unitary(dim, rng)[:, :d_in]
    return KrausChannel(tuple(iso[k::n_kraus, :] for k in range(n_kraus)))
