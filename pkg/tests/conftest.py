from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from fanosim.model import ModelParams
from fanosim.operators import PauliString, PauliSum

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
nonzero_coupling = st.one_of(st.floats(min_value=0.05, max_value=8), st.floats(min_value=-8, max_value=-0.05))
times = st.floats(min_value=0, max_value=5, allow_nan=False)


@st.composite
def model_params(draw, coupling=nonzero_coupling):
    return ModelParams(epsilon=draw(finite), epsilon_k0=draw(finite), V=draw(coupling))


@st.composite
def pauli_strings(draw, n_qubits: int):
    axes = draw(st.lists(st.sampled_from("IXYZ"), min_size=n_qubits, max_size=n_qubits))
    phase = draw(st.sampled_from([1, -1, 1j, -1j]))
    return PauliString.from_map(dict(enumerate(axes)), phase)


@st.composite
def hermitian_sums(draw, max_qubits: int = 4):
    n = draw(st.integers(1, max_qubits))
    terms = draw(st.lists(st.tuples(finite, pauli_strings(n)), min_size=1, max_size=6))
    # real coefficient on a phase-stripped string is Hermitian
    return n, PauliSum((c, s.stripped()) for c, s in terms)


def random_state(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
