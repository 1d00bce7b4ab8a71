"""Unit tests for the induced cq channels and the wiretap embedding."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.config import TEST_TOL
from src.errors import ValidationError
from src.quantum.channels import (
    Preprocessor,
    QubitChannelSpec,
    bsc,
    channel_state,
    classical_secrecy_quantities,
    degraded_wiretap_pmf,
    dephasing,
    embed_classical_wiretap,
    erasure,
    identity_channel,
    induce_all,
    induce_amplitude,
    induce_phase,
    induce_private,
    induce_reservoir,
    phase_information,
    random_qubit_channel,
    uncertainty_sum,
)
from src.quantum.qcore import (
    binary_entropy,
    channel_fidelity,
    holevo_information,
    measure_basis,
    partial_trace,
    random_kraus_channel,
)


def _spec(kraus, name="ch", split=None):
    return QubitChannelSpec(name=name, kraus=kraus, reservoir_split=split)


def test_identity_channel_induces_perfect_channels(identity_spec):
    induced = induce_all(identity_spec)

    assert holevo_information(induced.w_a) == pytest.approx(1.0, abs=TEST_TOL)
    assert channel_fidelity(induced.w_a) == pytest.approx(0.0, abs=TEST_TOL)
    assert holevo_information(induced.w_p) == pytest.approx(1.0, abs=TEST_TOL)
    assert holevo_information(induced.w_r) == pytest.approx(0.0, abs=TEST_TOL)


@pytest.mark.parametrize("p", [0.05, 0.1, 0.3])
def test_dephasing_phase_information(p):
    spec = _spec(dephasing(p))

    assert holevo_information(induce_amplitude(spec)) == pytest.approx(1.0, abs=TEST_TOL)
    assert holevo_information(induce_phase(spec)) == pytest.approx(
        1.0 - binary_entropy(p), abs=TEST_TOL
    )


@pytest.mark.parametrize("p", [0.25, 0.5, 0.6])
def test_erasure_channels(p):
    spec = _spec(erasure(p))
    w_a, w_p, w_r = induce_amplitude(spec), induce_phase(spec), induce_reservoir(spec)

    assert holevo_information(w_a) == pytest.approx(1.0 - p, abs=TEST_TOL)
    assert channel_fidelity(w_a) == pytest.approx(p, abs=TEST_TOL)
    assert holevo_information(w_p) == pytest.approx(1.0 - p, abs=TEST_TOL)
    assert holevo_information(w_r) == pytest.approx(p, abs=TEST_TOL)
    assert channel_fidelity(w_a) + channel_fidelity(w_p) == pytest.approx(2 * p, abs=TEST_TOL)


def test_phase_and_reservoir_information_sum_to_one(random_channels):
    for spec in random_channels(100):
        induced = induce_all(spec)
        total = holevo_information(induced.w_p) + holevo_information(induced.w_r)
        assert total == pytest.approx(1.0, abs=TEST_TOL), spec.name


def test_entropic_uncertainty_relation(random_channels):
    """H(Z^A | R) + H(X^A | BC) = 1."""
    for spec in random_channels(100, seed=11):
        psi = channel_state(spec)
        assert uncertainty_sum(psi, ("R",), ("B", "C")) == pytest.approx(1.0, abs=TEST_TOL)


def test_channel_state_reproduces_induced_outputs(random_channels):
    for spec in random_channels(20, seed=3):
        induced = induce_all(spec)
        psi = channel_state(spec)
        amp = measure_basis(psi, "A", "amplitude")
        phase = measure_basis(psi, "A", "phase")
        ab = partial_trace(amp, ["A", "B"]).matrix.reshape(2, 2, 2, 2)
        abc = partial_trace(phase, ["A", "B", "C"]).matrix.reshape(2, 4, 2, 4)
        ar = partial_trace(amp, ["A", "R"]).matrix
        d_r = ar.shape[0] // 2
        ar = ar.reshape(2, d_r, 2, d_r)
        for z in (0, 1):
            assert 2 * ab[z, :, z, :] == pytest.approx(induced.w_a.outputs[z].matrix, abs=1e-10)
            assert 2 * abc[z, :, z, :] == pytest.approx(induced.w_p.outputs[z].matrix, abs=1e-10)
            assert 2 * ar[z, :, z, :] == pytest.approx(induced.w_r.outputs[z].matrix, abs=1e-10)


def test_fidelity_uncertainty_for_complementary_channels(random_channels):
    """2F(W_P) + F(W_R) >= 1 and F(W_P) + 2F(W_R) >= 1."""
    for spec in random_channels(50, seed=5):
        induced = induce_all(spec)
        f_p, f_r = channel_fidelity(induced.w_p), channel_fidelity(induced.w_r)
        assert 2 * f_p + f_r >= 1.0 - TEST_TOL
        assert f_p + 2 * f_r >= 1.0 - TEST_TOL


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    n_kraus=st.integers(min_value=1, max_value=3),
)
def test_private_sum_rules(seed, n_kraus):
    """I(W_P-bar) + I(W_E-bar) = 1 and the shielded entropic relation, random preprocessors."""
    rng = np.random.default_rng(seed)
    kraus = random_kraus_channel(2, 2, 2 * n_kraus, rng)
    spec = _spec(kraus, split=(2, n_kraus))
    preproc = Preprocessor(random_kraus_channel(2, 2, 2, rng))

    induced = induce_private(spec, preproc)

    total = holevo_information(induced.w_p_bar) + holevo_information(induced.w_e_bar)
    assert total == pytest.approx(1.0, abs=TEST_TOL)
    psi_bar = induced.psi_bar
    assert uncertainty_sum(psi_bar, ("E",), ("B", "C", "S", "S'")) == pytest.approx(
        1.0, abs=TEST_TOL
    )


def test_identity_preprocessor_with_full_eavesdropper_matches_quantum_case(rng):
    spec = random_qubit_channel(rng, n_kraus=3)
    split = _spec(spec.kraus, split=(1, 3))
    induced = induce_private(split, Preprocessor.identity())

    assert holevo_information(induced.w_a_bar) == pytest.approx(
        holevo_information(induced.w_a), abs=TEST_TOL
    )
    assert holevo_information(induced.w_e_bar) == pytest.approx(
        holevo_information(induced.w_r), abs=TEST_TOL
    )


def test_shield_only_split_hides_everything(rng):
    spec = random_qubit_channel(rng, n_kraus=2)
    induced = induce_private(_spec(spec.kraus, split=(2, 1)), Preprocessor.identity())

    assert holevo_information(induced.w_e_bar) == pytest.approx(0.0, abs=TEST_TOL)
    assert holevo_information(induced.w_p_bar) == pytest.approx(1.0, abs=TEST_TOL)


def test_private_channels_need_a_split(dephasing_spec):
    with pytest.raises(ValidationError, match="reservoir_split"):
        induce_private(dephasing_spec, Preprocessor.identity())


def test_split_must_factor_the_environment():
    with pytest.raises(ValidationError, match="reservoir_split"):
        _spec(dephasing(0.1), split=(3, 1))


def test_wiretap_noiseless_bob_blind_eve():
    pmf = np.zeros((2, 2, 1))
    pmf[0, 0, 0] = pmf[1, 1, 0] = 1.0
    spec = embed_classical_wiretap(pmf)
    induced = induce_private(spec, Preprocessor.identity())

    secrecy = holevo_information(induced.w_a_bar) - holevo_information(induced.w_e_bar)
    assert secrecy == pytest.approx(1.0, abs=TEST_TOL)


@pytest.mark.parametrize("q", [0.05, 0.11, 0.3])
def test_wiretap_bsc_to_bob(q):
    pmf = bsc(q)[:, :, None]
    induced = induce_private(embed_classical_wiretap(pmf), Preprocessor.identity())

    secrecy = holevo_information(induced.w_a_bar) - holevo_information(induced.w_e_bar)
    assert secrecy == pytest.approx(1.0 - binary_entropy(q), abs=TEST_TOL)


def test_degraded_wiretap_reproduces_classical_quantities():
    pmf = degraded_wiretap_pmf(0.1, 0.2)
    bob, eve = classical_secrecy_quantities(pmf)
    induced = induce_private(embed_classical_wiretap(pmf), Preprocessor.identity())

    assert holevo_information(induced.w_a_bar) == pytest.approx(bob, abs=TEST_TOL)
    assert holevo_information(induced.w_e_bar) == pytest.approx(eve, abs=TEST_TOL)


def test_wiretap_output_is_classical():
    spec = embed_classical_wiretap(degraded_wiretap_pmf(0.1, 0.25))
    for x in (0, 1):
        rho = np.zeros((2, 2))
        rho[x, x] = 1.0
        out = spec.kraus.apply(rho)
        assert np.linalg.norm(out - np.diag(np.diag(out))) < 1e-12


def test_wiretap_rejects_bad_rows():
    pmf = np.full((2, 2, 1), 0.4)
    with pytest.raises(ValidationError, match="sum to"):
        embed_classical_wiretap(pmf)


def test_preprocessor_must_be_qubit_map(rng):
    with pytest.raises(ValidationError):
        Preprocessor(random_kraus_channel(2, 3, 2, rng))


def test_spec_keeps_name_and_kind():
    spec = _spec(identity_channel(), name="id")
    assert spec.name == "id"
    assert spec.kraus.d_in == 2


def test_phase_information_on_channel_state(random_channels):
    for spec in random_channels(20, seed=13):
        expected = holevo_information(induce_phase(spec))
        assert phase_information(channel_state(spec)) == pytest.approx(expected, abs=TEST_TOL)


def test_unshielded_phase_channel_with_identity_preprocessor_is_w_p(rng):
    spec = random_qubit_channel(rng, n_kraus=4)
    induced = induce_private(_spec(spec.kraus, split=(2, 2)), Preprocessor.identity())

    assert holevo_information(induced.w_p_bar_unshielded) == pytest.approx(
        holevo_information(induced.w_p), abs=TEST_TOL
    )


def test_shields_never_hurt_the_phase_decoder(rng):
    for _ in range(10):
        kraus = random_kraus_channel(2, 2, 4, rng)
        preproc = Preprocessor(random_kraus_channel(2, 2, 2, rng))
        induced = induce_private(_spec(kraus, split=(2, 2)), preproc)

        shielded = holevo_information(induced.w_p_bar)
        unshielded = holevo_information(induced.w_p_bar_unshielded)
        assert shielded >= unshielded - TEST_TOL


def test_shield_only_split_separates_the_two_phase_channels(rng):
    spec = random_qubit_channel(rng, n_kraus=2)
    induced = induce_private(_spec(spec.kraus, split=(2, 1)), Preprocessor.identity())

    assert holevo_information(induced.w_p_bar) == pytest.approx(1.0, abs=TEST_TOL)
    assert holevo_information(induced.w_p_bar_unshielded) < 1.0 - 1e-6


def test_information_is_at_least_log_of_fidelity_bound(random_channels):
    """I(W) >= log2(2 / (1 + F(W))) for every induced channel."""
    for spec in random_channels(200, seed=31):
        induced = induce_all(spec)
        for W in (induced.w_a, induced.w_p, induced.w_r):
            floor = np.log2(2.0 / (1.0 + channel_fidelity(W)))
            assert holevo_information(W) >= floor - TEST_TOL
