"""
Induced cq channels of a qubit channel.

Given N^{A'->B} with Stinespring dilation U_N^{A'->BR}, this module builds
- the amplitude channel W_A: z -> N(|z><z|) on B,
- the phase channel W_P: x -> sigma_x on B (x) C, where
  |sigma_x> = 2^{-1/2} sum_z (-1)^{xz} |z>^C U_N|z>,
- the reservoir channel W_R: z -> the environment output,
- the channel state psi^{ABCR} = 2^{-1/2} sum_z |z>^A |z>^C U_N|z>,
and their private counterparts once the environment is split into a shield S and an
eavesdropper E and a preprocessing map M is prepended.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.config import STRUCTURAL_TOL
from src.errors import ValidationError
from src.quantum.qcore import (
    CqChannel,
    Isometry,
    KrausChannel,
    PureState,
    conditional_entropy,
    measure_basis,
    mutual_information,
    partial_trace,
    random_kraus_channel,
    stinespring,
)

logger = logging.getLogger(__name__)

_SIGNS = np.array([[1.0, 1.0], [1.0, -1.0]])


@dataclass(frozen=True)
class QubitChannelSpec:
    name: str
    kraus: KrausChannel
    reservoir_split: Optional[tuple[int, int]] = None
    degradable: bool = False

    def __post_init__(self):
        if self.reservoir_split is not None:
            split = tuple(int(d) for d in self.reservoir_split)
            object.__setattr__(self, "reservoir_split", split)
            if len(split) != 2 or min(split) < 1:
                raise ValidationError("must be two positive dimensions", field="reservoir_split")
            env = len(self.kraus.kraus_ops)
            if split[0] * split[1] != env:
                raise ValidationError(
                    f"dim(S) * dim(E) = {split[0] * split[1]} but the Kraus list has {env} entries",
                    field="reservoir_split",
                )

    def require_qubit_input(self) -> None:
        if self.kraus.d_in != 2:
            raise ValidationError(
                f"induced channels need a qubit input, got d_in={self.kraus.d_in}"
            )

    def dilation(self) -> Isometry:
        """U_N with output (B, R), or (B, S, E) when the environment is split."""
        if self.reservoir_split is None:
            return stinespring(self.kraus)
        iso = stinespring(self.kraus, minimal=False)
        d_s, d_e = self.reservoir_split
        return Isometry(iso.matrix, (self.kraus.d_out, d_s, d_e), ("B", "S", "E"))


@dataclass(frozen=True)
class Preprocessor:
    """The map M^{A'->A'} Alice prepends in the private scheme."""

    make: KrausChannel

    def __post_init__(self):
        if self.make.d_in != 2 or self.make.d_out != 2:
            raise ValidationError("preprocessor must map a qubit to a qubit")

    def dilation(self) -> Isometry:
        return stinespring(self.make, labels=("A'", "S'"))

    @classmethod
    def identity(cls) -> "Preprocessor":
        return cls(KrausChannel((np.eye(2),)))

    @classmethod
    def from_signal_states(cls, rho0: np.ndarray, rho1: np.ndarray) -> "Preprocessor":
        """Measure-and-prepare map z -> rho_z."""
        ops = []
        for z, rho in enumerate((rho0, rho1)):
            w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
            for lam, vec in zip(w, v.T):
                if lam > 1e-15:
                    ops.append(np.sqrt(lam) * np.outer(vec, np.eye(2)[z]))
        return cls(KrausChannel(tuple(ops)))

    @classmethod
    def from_bloch(cls, v0: np.ndarray, v1: np.ndarray) -> "Preprocessor":
        """Signal states from two Bloch vectors, scaled back into the unit ball."""
        return cls.from_signal_states(bloch_state(v0), bloch_state(v1))


def bloch_state(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    v = v / max(1.0, float(np.linalg.norm(v)))
    x, y, z = v
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)


@dataclass(frozen=True)
class InducedChannels:
    w_a: CqChannel
    w_p: CqChannel
    w_r: CqChannel
    psi: PureState
    w_a_bar: Optional[CqChannel] = None
    w_p_bar: Optional[CqChannel] = None
    w_e_bar: Optional[CqChannel] = None
    psi_bar: Optional[PureState] = None
    # phase channel with the shields discarded (decoder without S, S')
    w_p_bar_unshielded: Optional[CqChannel] = None

    @property
    def is_private(self) -> bool:
        return self.w_a_bar is not None


def _signal_tensor(ch: QubitChannelSpec) -> tuple[np.ndarray, tuple[int, ...], tuple[str, ...]]:
    """U_N|z> as an array indexed [z, b, env...] with the environment dims and labels."""
    ch.require_qubit_input()
    iso = ch.dilation()
    t = iso.matrix.reshape(iso.out_dims + (2,))
    return np.moveaxis(t, -1, 0), iso.out_dims[1:], iso.out_labels[1:]


def _cq_from_vectors(vectors: np.ndarray, dims, labels, keep, name: str) -> CqChannel:
    outputs = tuple(
        partial_trace(PureState(vectors[k].reshape(-1), dims, labels), keep) for k in range(2)
    )
    return CqChannel(outputs, name=name)


def _phase_vectors(signals: np.ndarray) -> np.ndarray:
    """|sigma_x> indexed [x, b, c, rest...] from signals indexed [z, b, rest...]."""
    # t[x, c, b, ...] = (-1)^{xc} signals[c, b, ...] / sqrt 2
    t = np.einsum("xc,cb...->xcb...", _SIGNS, signals) / np.sqrt(2.0)
    return np.swapaxes(t, 1, 2)


def induce_amplitude(ch: QubitChannelSpec) -> CqChannel:
    signals, env_dims, env_labels = _signal_tensor(ch)
    dims = (ch.kraus.d_out,) + env_dims
    return _cq_from_vectors(signals, dims, ("B",) + env_labels, ["B"], f"{ch.name}:W_A")


def induce_phase(ch: QubitChannelSpec) -> CqChannel:
    signals, env_dims, env_labels = _signal_tensor(ch)
    dims = (ch.kraus.d_out, 2) + env_dims
    labels = ("B", "C") + env_labels
    return _cq_from_vectors(_phase_vectors(signals), dims, labels, ["B", "C"], f"{ch.name}:W_P")


def induce_reservoir(ch: QubitChannelSpec) -> CqChannel:
    signals, env_dims, env_labels = _signal_tensor(ch)
    dims = (ch.kraus.d_out,) + env_dims
    return _cq_from_vectors(signals, dims, ("B",) + env_labels, env_labels, f"{ch.name}:W_R")


def _state_from_signals(signals: np.ndarray, dims_rest, labels_rest) -> PureState:
    # psi[a, b, c, rest] = delta_{ac} signals[a, b, rest] / sqrt 2
    t = np.zeros((2,) + signals.shape[1:2] + (2,) + signals.shape[2:], dtype=complex)
    for z in range(2):
        t[z, :, z, ...] = signals[z] / np.sqrt(2.0)
    d_b = signals.shape[1]
    return PureState(t.reshape(-1), (2, d_b, 2) + dims_rest, ("A", "B", "C") + labels_rest)


def channel_state(ch: QubitChannelSpec) -> PureState:
    """psi over A, B, C and the environment (R, or S and E)."""
    signals, env_dims, env_labels = _signal_tensor(ch)
    return _state_from_signals(signals, env_dims, env_labels)


def induce_all(ch: QubitChannelSpec) -> InducedChannels:
    return InducedChannels(
        w_a=induce_amplitude(ch),
        w_p=induce_phase(ch),
        w_r=induce_reservoir(ch),
        psi=channel_state(ch),
    )


def _private_signals(ch: QubitChannelSpec, m: Preprocessor) -> tuple[np.ndarray, tuple, tuple]:
    """theta_z = U_N U_M |z> indexed [z, b, s, s', e]."""
    if ch.reservoir_split is None:
        raise ValidationError("private channels need a reservoir split", field="reservoir_split")
    signals, env_dims, _ = _signal_tensor(ch)  # [a, b, s, e]
    pre = m.dilation()
    d_sp = pre.out_dims[1]
    u_m = pre.matrix.reshape(2, d_sp, 2)  # [a, s', z]
    theta = np.einsum("abse,apz->zbspe", signals, u_m)
    d_s, d_e = env_dims
    return theta, (d_s, d_sp, d_e), ("S", "S'", "E")


def induce_private(ch: QubitChannelSpec, m: Preprocessor) -> InducedChannels:
    """
    Quantum and private induced channels together.

    The private channels are W_A-bar: z -> theta_z^B, W_P-bar: x -> omega_x^{BCSS'} and
    W_E-bar: z -> theta_z^E with theta_z = U_N U_M |z>.
    """
    base = induce_all(ch)
    theta, rest_dims, rest_labels = _private_signals(ch, m)
    d_b = ch.kraus.d_out
    dims = (d_b,) + rest_dims
    labels = ("B",) + rest_labels
    w_a_bar = _cq_from_vectors(theta, dims, labels, ["B"], f"{ch.name}:W_A_bar")
    w_e_bar = _cq_from_vectors(theta, dims, labels, ["E"], f"{ch.name}:W_E_bar")
    omega = _phase_vectors(theta)
    phase_dims = (d_b, 2) + rest_dims
    phase_labels = ("B", "C") + rest_labels
    w_p_bar = _cq_from_vectors(
        omega, phase_dims, phase_labels, ["B", "C", "S", "S'"], f"{ch.name}:W_P_bar"
    )
    unshielded = _cq_from_vectors(
        omega, phase_dims, phase_labels, ["B", "C"], f"{ch.name}:W_P_bar_BC"
    )
    logger.debug("induce_private: %s with shield dims %s", ch.name, rest_dims[:2])
    return InducedChannels(
        w_a=base.w_a,
        w_p=base.w_p,
        w_r=base.w_r,
        psi=base.psi,
        w_a_bar=w_a_bar,
        w_p_bar=w_p_bar,
        w_e_bar=w_e_bar,
        psi_bar=_state_from_signals(theta, rest_dims, rest_labels),
        w_p_bar_unshielded=unshielded,
    )


def uncertainty_sum(psi: PureState, eve: tuple[str, ...], bob: tuple[str, ...]) -> float:
    """H(Z^A | eve) + H(X^A | bob) on a channel state; 1 when eve and bob purify each other."""
    amp = measure_basis(psi, "A", "amplitude")
    phase = measure_basis(psi, "A", "phase")
    return conditional_entropy(amp, ["A"], eve) + conditional_entropy(phase, ["A"], bob)


def phase_information(psi: PureState, bob: tuple[str, ...] = ("B", "C")) -> float:
    """I(X^A; bob) on a channel state."""
    return mutual_information(measure_basis(psi, "A", "phase"), ["A"], bob)


# ---------------------------------------------------------------------------
# Classical wiretap embedding
# ---------------------------------------------------------------------------


def _check_pmf(pmf: np.ndarray) -> np.ndarray:
    pmf = np.asarray(pmf, dtype=float)
    if pmf.ndim != 3:
        raise ValidationError("pmf must be indexed [x, y, z]", field="pmf")
    if np.any(pmf < -STRUCTURAL_TOL):
        raise ValidationError("pmf has negative entries", field="pmf")
    rows = pmf.reshape(pmf.shape[0], -1).sum(axis=1)
    bad = np.flatnonzero(np.abs(rows - 1.0) > 1e-9)
    if bad.size:
        raise ValidationError(
            f"rows {bad.tolist()} sum to {rows[bad].round(12).tolist()}, expected 1", field="pmf"
        )
    pmf = np.clip(pmf, 0.0, None)
    return pmf / pmf.reshape(pmf.shape[0], -1).sum(axis=1)[:, None, None]


def embed_classical_wiretap(pmf: np.ndarray, name: str = "classical_wiretap") -> QubitChannelSpec:
    """
    Quantum channel that measures its input and emits Bob's symbol y, with Eve's symbol z in
    the environment.

    The environment is S (x) E with S holding a copy of (x, y, z) and E holding z, so the
    Kraus list is indexed by (x, y, z, e) and is nonzero only when e == z.
    """
    pmf = _check_pmf(pmf)
    d_x, d_y, d_z = pmf.shape
    ops = []
    for x in range(d_x):
        for y in range(d_y):
            for z in range(d_z):
                for e in range(d_z):
                    op = np.zeros((d_y, d_x), dtype=complex)
                    if e == z:
                        op[y, x] = np.sqrt(pmf[x, y, z])
                    ops.append(op)
    return QubitChannelSpec(
        name=name,
        kraus=KrausChannel(tuple(ops)),
        reservoir_split=(d_x * d_y * d_z, d_z),
        degradable=False,
    )


def _mutual_information_uniform(joint_given_x: np.ndarray) -> float:
    """I(X; Y) for uniform X given rows p(y|x)."""
    p_xy = joint_given_x / joint_given_x.shape[0]
    p_x = p_xy.sum(axis=1, keepdims=True)
    p_y = p_xy.sum(axis=0, keepdims=True)
    mask = p_xy > 0
    return float(np.sum(p_xy[mask] * np.log2(p_xy[mask] / (p_x @ p_y)[mask])))


def classical_secrecy_quantities(pmf: np.ndarray) -> tuple[float, float]:
    """(I(X;Y), I(X;Z)) for uniform X under p(y, z | x)."""
    pmf = _check_pmf(pmf)
    bob = _mutual_information_uniform(pmf.sum(axis=2))
    eve = _mutual_information_uniform(pmf.sum(axis=1))
    return bob, eve


def bsc(q: float) -> np.ndarray:
    return np.array([[1.0 - q, q], [q, 1.0 - q]])


def degraded_wiretap_pmf(q_bob: float, q_eve: float) -> np.ndarray:
    """Bob sees X through BSC(q_bob); Eve sees Bob's output through a further BSC(q_eve)."""
    p_y = bsc(q_bob)
    p_z = bsc(q_eve)
    return np.einsum("xy,yz->xyz", p_y, p_z)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def identity_channel() -> KrausChannel:
    return KrausChannel((np.eye(2),))


def dephasing(p: float) -> KrausChannel:
    _check_probability(p, "p")
    return KrausChannel((np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * np.diag([1.0, -1.0])))


def amplitude_damping(gamma: float) -> KrausChannel:
    _check_probability(gamma, "gamma")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return KrausChannel((k0, k1))


def erasure(p: float) -> KrausChannel:
    """Qubit erasure into a three-level output; level 2 is the erasure flag."""
    _check_probability(p, "p")
    keep = np.zeros((3, 2))
    keep[0, 0] = keep[1, 1] = np.sqrt(1 - p)
    flag0 = np.zeros((3, 2))
    flag0[2, 0] = np.sqrt(p)
    flag1 = np.zeros((3, 2))
    flag1[2, 1] = np.sqrt(p)
    return KrausChannel((keep, flag0, flag1))


def depolarizing(p: float) -> KrausChannel:
    """rho -> (1 - p) rho + p I/2."""
    _check_probability(p, "p")
    paulis = (
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.diag([1.0, -1.0]).astype(complex),
    )
    ops = [np.sqrt(1 - 3 * p / 4) * np.eye(2)] + [np.sqrt(p / 4) * s for s in paulis]
    return KrausChannel(tuple(ops))


def _check_probability(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"must lie in [0, 1], got {value}", field=name)


def random_qubit_channel(
    rng: np.random.Generator, n_kraus: int = 3, d_out: int = 2
) -> QubitChannelSpec:
    return QubitChannelSpec(
        name=f"random_{n_kraus}", kraus=random_kraus_channel(2, d_out, n_kraus, rng)
    )
