"""Unit tests for the dense quantum primitives."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.config import TEST_TOL
from src.errors import ValidationError
from src.quantum.qcore import (
    CqChannel,
    DensityOperator,
    HybridBlock,
    HybridCqState,
    KrausChannel,
    PureState,
    basis_vector,
    binary_entropy,
    channel_fidelity,
    conditional_entropy,
    fidelity,
    holevo_information,
    maximally_entangled,
    measure_basis,
    minimal_kraus,
    mutual_information,
    pair_statistics,
    partial_trace,
    permute,
    random_density,
    random_kraus_channel,
    random_pure_state,
    random_unitary,
    stinespring,
    trace_distance,
    von_neumann_entropy,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _density(matrix, label="B"):
    return DensityOperator(matrix, (matrix.shape[0],), (label,))


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(min_value=2, max_value=4))
def test_fidelity_is_symmetric_and_bounded(seed, dim):
    rng = np.random.default_rng(seed)
    a = _density(random_density(dim, rng))
    b = _density(random_density(dim, rng))

    f_ab = fidelity(a, b)

    assert 0.0 <= f_ab <= 1.0
    assert f_ab == pytest.approx(fidelity(b, a), abs=TEST_TOL)
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_trace_distance_sandwiched_by_fidelity(seed):
    """1 - F <= D <= sqrt(1 - F^2)."""
    rng = np.random.default_rng(seed)
    a, b = random_density(3, rng), random_density(3, rng)
    f = fidelity(_density(a), _density(b))
    d = trace_distance(a, b)

    assert 1.0 - f <= d + TEST_TOL
    assert d <= np.sqrt(max(0.0, 1.0 - f**2)) + TEST_TOL


def test_pure_fidelity_is_overlap():
    zero = PureState(basis_vector(0, 2), (2,), ("B",))
    plus = PureState(np.array([1.0, 1.0]) / np.sqrt(2.0), (2,), ("B",))

    assert fidelity(zero, plus) == pytest.approx(1.0 / np.sqrt(2.0), abs=TEST_TOL)
    assert fidelity(zero, PureState(basis_vector(1, 2), (2,), ("B",))) == 0.0


def test_hybrid_fidelity_averages_blocks():
    """Equal-weight blocks with fidelities 0 and 1 give 0.5."""
    zero = _density(np.diag([1.0, 0.0]))
    one = _density(np.diag([0.0, 1.0]))
    a = HybridCqState((HybridBlock("0", 0.5, zero), HybridBlock("1", 0.5, zero)))
    b = HybridCqState((HybridBlock("0", 0.5, one), HybridBlock("1", 0.5, zero)))

    assert channel_fidelity(CqChannel((a, b))) == pytest.approx(0.5, abs=TEST_TOL)


def test_holevo_information_extremes():
    zero = _density(np.diag([1.0, 0.0]))
    one = _density(np.diag([0.0, 1.0]))

    assert holevo_information(CqChannel((zero, one))) == pytest.approx(1.0, abs=TEST_TOL)
    assert holevo_information(CqChannel((zero, zero))) == pytest.approx(0.0, abs=TEST_TOL)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_pair_statistics_matches_separate_routines(seed):
    rng = np.random.default_rng(seed)
    r0, r1 = random_density(2, rng), random_density(2, rng)
    W = CqChannel((_density(r0), _density(r1)))

    info, fid = pair_statistics(r0, r1)

    assert info == pytest.approx(holevo_information(W), abs=TEST_TOL)
    assert fid == pytest.approx(channel_fidelity(W), abs=1e-8)


def test_entropy_of_maximally_mixed_state():
    for d in (2, 3, 4):
        assert von_neumann_entropy(_density(np.eye(d) / d)) == pytest.approx(np.log2(d))


def test_binary_entropy_endpoints():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0)


def test_bell_state_entropies():
    bell = maximally_entangled(2, ("A", "B"))

    assert partial_trace(bell, ["A"]).matrix == pytest.approx(np.eye(2) / 2)
    assert conditional_entropy(bell, ["A"], ["B"]) == pytest.approx(-1.0, abs=TEST_TOL)
    assert mutual_information(bell, ["A"], ["B"]) == pytest.approx(2.0, abs=TEST_TOL)

    measured = measure_basis(bell, "A", "amplitude")
    assert mutual_information(measured, ["A"], ["B"]) == pytest.approx(1.0, abs=TEST_TOL)
    measured = measure_basis(bell, "A", "phase")
    assert mutual_information(measured, ["A"], ["B"]) == pytest.approx(1.0, abs=TEST_TOL)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, n_kraus=st.integers(min_value=1, max_value=4))
def test_stinespring_reproduces_channel(seed, n_kraus):
    rng = np.random.default_rng(seed)
    ch = random_kraus_channel(2, 2, n_kraus, rng)
    rho = random_density(2, rng)

    out = stinespring(ch).apply(rho)

    assert partial_trace(out, ["B"]).matrix == pytest.approx(ch.apply(rho), abs=1e-10)


def test_minimal_kraus_merges_proportional_operators():
    k = np.eye(2) / np.sqrt(2.0)
    ops = minimal_kraus((k, k))

    assert len(ops) == 1
    assert sum(o.conj().T @ o for o in ops) == pytest.approx(np.eye(2))


def test_incomplete_kraus_set_is_rejected():
    with pytest.raises(ValidationError, match="trace preserving"):
        KrausChannel((np.diag([1.0, 0.5]),))


def test_pure_state_rejects_bad_norm_and_labels():
    with pytest.raises(ValidationError):
        PureState(np.array([1.0, 1.0]), (2,), ("A",))
    with pytest.raises(ValidationError):
        PureState(basis_vector(0, 4), (2, 2), ("A", "A"))


def test_validate_rejects_negative_eigenvalue():
    with pytest.raises(ValidationError, match="negative eigenvalue"):
        _density(np.diag([1.2, -0.2])).validate()


def test_permute_preserves_reduced_states(rng):
    psi = random_pure_state((2, 3), ("A", "B"), rng)
    swapped = permute(psi, ["B", "A"])

    assert swapped.dims == (3, 2)
    assert partial_trace(swapped, ["A"]).matrix == pytest.approx(
        partial_trace(psi, ["A"]).matrix, abs=1e-12
    )


def test_orthogonal_pair_has_exactly_zero_fidelity(rng):
    """Rounding noise on orthogonal supports is floored, so sqrt(F) stays at zero."""
    for dim in (2, 3, 4):
        u = random_unitary(dim, rng)
        r0 = np.outer(u[:, 0], u[:, 0].conj())
        r1 = np.outer(u[:, 1], u[:, 1].conj())

        _, fid = pair_statistics(r0, r1)

        assert fid == 0.0
