"""Unit tests for partitions, rates, private search and rate composition."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.config import TEST_TOL
from src.errors import InvariantViolation, ValidationError
from src.quantum.channels import (
    Preprocessor,
    QubitChannelSpec,
    amplitude_damping,
    dephasing,
    embed_classical_wiretap,
    erasure,
    induce_all,
)
from src.quantum.design import (
    CodePartition,
    coherent_information,
    degradable_disjointness_check,
    design_private,
    design_quantum,
    erasure_bound_check,
    factor_rate_terms,
    partition,
    private_information,
    private_information_search,
    quantum_rate,
    rate_identity_check,
    superactivation_compose,
    uncertainty_report,
)
from src.quantum.polarize import Side, bec_evolve, bounds_table, default_threshold
from src.quantum.qcore import binary_entropy, holevo_information, random_kraus_channel


def _erasure_partition(p: float, n: int) -> CodePartition:
    amp = bec_evolve(p, n)
    phase = bounds_table(p, n, Side.PHASE)
    return partition(amp, phase)


def test_coherent_information_matches_induced_rates(random_channels):
    """I_c = I(W_A) + I(W_P) - 1."""
    for spec in random_channels(100, seed=17):
        induced = induce_all(spec)
        expected = holevo_information(induced.w_a) + holevo_information(induced.w_p) - 1.0
        assert coherent_information(spec) == pytest.approx(expected, abs=TEST_TOL)


@pytest.mark.parametrize("p", [0.1, 0.25])
def test_coherent_information_of_presets(p):
    deph = QubitChannelSpec("deph", dephasing(p))
    era = QubitChannelSpec("era", erasure(p))

    assert coherent_information(deph) == pytest.approx(1.0 - binary_entropy(p), abs=TEST_TOL)
    assert coherent_information(era) == pytest.approx(1.0 - 2 * p, abs=TEST_TOL)


@settings(max_examples=60, deadline=None)
@given(
    good_a=st.sets(st.integers(min_value=1, max_value=16)),
    good_p=st.sets(st.integers(min_value=1, max_value=16)),
)
def test_rate_identity_is_a_set_identity(good_a, good_p):
    everything = frozenset(range(1, 17))
    good_a, good_p = frozenset(good_a), frozenset(good_p)
    part = CodePartition(
        n=4,
        A=good_a & good_p,
        X=good_a - good_p,
        Z=good_p - good_a,
        B=everything - good_a - good_p,
        threshold=0.1,
        provenance="bounds",
        good_amplitude=good_a,
        good_phase=good_p,
    )

    assert rate_identity_check(part)
    assert quantum_rate(part).rate == pytest.approx((len(good_a) + len(good_p) - 16) / 16)


def test_partition_must_cover_indices():
    with pytest.raises(InvariantViolation):
        CodePartition(
            n=1,
            A=frozenset({1}),
            X=frozenset(),
            Z=frozenset(),
            B=frozenset(),
            threshold=0.5,
            provenance="exact",
        )


def test_partition_rejects_mixed_depths():
    with pytest.raises(ValidationError, match="mixed N"):
        partition(bec_evolve(0.3, 2), bounds_table(0.3, 3, Side.PHASE))


def test_identity_design_uses_every_index(identity_spec):
    design = design_quantum(identity_spec, 2)

    assert design.partition.A == frozenset({1, 2, 3, 4})
    assert design.rate.rate == pytest.approx(1.0)
    assert design.partition.provenance == "exact"


def test_dephasing_design_passes_identity_check(dephasing_spec):
    design = design_quantum(dephasing_spec, 3)

    assert design.rate.identity_holds
    assert design.rate.asymptotic_target == pytest.approx(
        1.0 - binary_entropy(0.1), abs=TEST_TOL
    )
    assert design.partition.threshold == pytest.approx(default_threshold(8))


def test_bounds_mode_design(dephasing_spec):
    design = design_quantum(dephasing_spec, 8, mode="bounds")

    assert design.partition.provenance == "bounds"
    assert rate_identity_check(design.partition)


def test_unknown_mode_is_rejected(dephasing_spec):
    with pytest.raises(ValidationError, match="mode"):
        design_quantum(dephasing_spec, 2, mode="fast")


def test_erasure_assisted_set_is_monotone_in_p():
    n = 20
    sets = [_erasure_partition(p, n).B for p in (0.25, 0.5, 0.6)]

    assert sets[0] <= sets[1] <= sets[2]


def test_erasure_assisted_fraction_above_one_half():
    """|B|/N >= 1 - 2(1 - p)/(1 - delta), which is at least 0.05 at p = 0.6."""
    n, p = 20, 0.6
    part = _erasure_partition(p, n)
    delta = part.threshold
    fraction = len(part.B) / part.N

    assert fraction >= 1.0 - 2.0 * (1.0 - p) / (1.0 - delta) - 1e-12
    assert fraction >= 0.05


@pytest.mark.parametrize("p", [0.1, 0.25, 0.5, 0.6])
def test_erasure_fidelities_sum_to_twice_p(p):
    report = erasure_bound_check(QubitChannelSpec("era", erasure(p)))

    assert report.f_amplitude + report.f_phase == pytest.approx(2 * p, abs=TEST_TOL)
    assert report.holds == (p <= 0.5)


def test_degradable_channels_keep_assistance_away_from_reservoir():
    for kraus in (dephasing(0.1), amplitude_damping(0.3)):
        spec = QubitChannelSpec("deg", kraus, degradable=True)
        report = degradable_disjointness_check(spec, 2)
        assert report.fidelity_relation_holds
        assert report.worst_fidelity_margin >= -TEST_TOL
        assert report.phase_reservoir_disjoint
        assert report.assisted_reservoir_disjoint
        assert report.passed


def test_private_information_of_bsc_wiretap():
    q = 0.11
    pmf = np.array([[1 - q, q], [q, 1 - q]])[:, :, None]
    spec = embed_classical_wiretap(pmf)

    value = private_information(spec, Preprocessor.identity())

    assert value == pytest.approx(1.0 - binary_entropy(q), abs=TEST_TOL)


def test_private_search_certifies_its_value(erasure_spec):
    result = private_information_search(erasure_spec, restarts=2, seed=3, max_iter=150)

    assert result.value == pytest.approx(
        private_information(erasure_spec, result.preprocessor), abs=1e-10
    )
    basis = private_information(erasure_spec, Preprocessor.identity())
    assert result.value >= basis - TEST_TOL
    assert result.seed == 3


def test_private_search_needs_a_split(dephasing_spec):
    with pytest.raises(ValidationError):
        private_information_search(dephasing_spec)


def test_private_design_on_wiretap():
    q = 0.05
    pmf = np.array([[1 - q, q], [q, 1 - q]])[:, :, None]
    spec = embed_classical_wiretap(pmf)

    design = design_private(spec, Preprocessor.identity(), 2)

    assert design.rate.kind == "private"
    assert design.rate.identity_holds
    assert design.rate.asymptotic_target == pytest.approx(1 - binary_entropy(q), abs=TEST_TOL)


def test_uncertainty_report_for_erasure(erasure_spec):
    report = uncertainty_report(erasure_spec)

    assert report.info["W_A"] == pytest.approx(0.75, abs=TEST_TOL)
    assert report.fidelity["W_A"] == pytest.approx(0.25, abs=TEST_TOL)
    assert report.info["W_P"] == pytest.approx(0.75, abs=TEST_TOL)
    assert report.information_sum == pytest.approx(1.0, abs=TEST_TOL)
    assert report.entropic_sum == pytest.approx(1.0, abs=TEST_TOL)
    assert report.assistance_vanishes
    assert report.private_information_sum == pytest.approx(1.0, abs=TEST_TOL)
    assert report.info["W_P_bar_BC"] <= report.info["W_P_bar"] + TEST_TOL
    assert report.coherent_information == pytest.approx(
        report.symmetric_coherent_information, abs=TEST_TOL
    )


def test_uncertainty_report_without_split(identity_spec):
    report = uncertainty_report(identity_spec)

    assert report.info["W_A"] == pytest.approx(1.0, abs=TEST_TOL)
    assert report.info["W_P"] == pytest.approx(1.0, abs=TEST_TOL)
    assert report.private_information_sum is None


def test_factor_terms_compose_to_joint_coherent_information():
    gen = np.random.default_rng(41)
    for _ in range(20):
        joint = random_kraus_channel(4, 4, int(gen.integers(1, 4)), gen)
        terms = factor_rate_terms(joint, 2)
        total = superactivation_compose(terms).rate
        assert total == pytest.approx(coherent_information(joint), abs=TEST_TOL)
        swapped = superactivation_compose(factor_rate_terms(joint, 2, order=[2, 1])).rate
        assert swapped == pytest.approx(total, abs=TEST_TOL)


def test_factor_order_must_be_a_permutation():
    joint = random_kraus_channel(4, 4, 1, np.random.default_rng(0))
    with pytest.raises(ValidationError, match="order"):
        factor_rate_terms(joint, 2, order=[1, 1])
