import os
import sys

# Ensure project root is in python path - MUST be before src imports
sys.path.append(os.getcwd())

import json

import numpy as np
import pytest
from dotenv import load_dotenv

from src.quantum.channels import (
    QubitChannelSpec,
    amplitude_damping,
    dephasing,
    erasure,
    identity_channel,
    random_qubit_channel,
)

load_dotenv()


@pytest.fixture
def rng():
    """Seeded generator; every test that draws random numbers starts from the same state."""
    return np.random.default_rng(20240611)


@pytest.fixture
def random_channels():
    """Factory for seeded random qubit channels with 1-4 Kraus operators."""

    def make(count: int, seed: int = 7):
        gen = np.random.default_rng(seed)
        return [random_qubit_channel(gen, n_kraus=int(gen.integers(1, 5))) for _ in range(count)]

    return make


@pytest.fixture
def identity_spec():
    return QubitChannelSpec(name="identity", kraus=identity_channel(), degradable=True)


@pytest.fixture
def dephasing_spec():
    """Dephasing(0.1), degradable."""
    return QubitChannelSpec(name="dephasing(0.1)", kraus=dephasing(0.1), degradable=True)


@pytest.fixture
def amplitude_damping_spec():
    return QubitChannelSpec(
        name="amplitude_damping(0.3)", kraus=amplitude_damping(0.3), degradable=True
    )


@pytest.fixture
def erasure_spec():
    """Erasure(0.25) with the whole environment held by the eavesdropper."""
    return QubitChannelSpec(name="erasure(0.25)", kraus=erasure(0.25), reservoir_split=(1, 3))


@pytest.fixture
def write_json(tmp_path):
    """Writes a dict as JSON under tmp_path and returns the path as a string."""

    def write(name: str, payload: dict) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return write
