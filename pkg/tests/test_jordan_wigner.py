from __future__ import annotations

import itertools

import numpy as np
import pytest

from fanosim.constants import ALGEBRA_TOL
from fanosim.jordan_wigner import (
    FermionOp,
    OccupationState,
    annihilation,
    creation,
    describe,
    jw_map,
    jw_state,
    jw_vector,
    number,
    vacuum,
)
from fanosim.operators import pauli, sigma_minus, sigma_plus


def dense_ops(n_modes):
    a = [annihilation(m, n_modes).to_dense(n_modes) for m in range(n_modes)]
    return a, [x.conj().T for x in a]


def test_impurity_creation_is_raising_on_first_qubit():
    for n_modes in (1, 2, 4):
        assert jw_map(FermionOp(0, True), n_modes).isclose(sigma_plus(0))
    assert describe(creation(0, 2)) == "σ₊ on qubit 1"


def test_first_ring_mode_annihilation():
    expected = pauli("Z", 0, -1.0) * sigma_minus(1)
    assert annihilation(1, 2).isclose(expected)


def test_creation_is_adjoint_of_annihilation():
    for m in range(4):
        assert creation(m, 4).isclose(annihilation(m, 4).adjoint())


def test_mode_out_of_range():
    with pytest.raises(ValueError):
        jw_map(FermionOp(3), 3)
    with pytest.raises(ValueError):
        FermionOp(-1)


@pytest.mark.parametrize("n_modes", [1, 2, 3, 4, 5])
def test_canonical_anticommutation(n_modes):
    a, ad = dense_ops(n_modes)
    eye = np.eye(2**n_modes)
    for i, j in itertools.product(range(n_modes), repeat=2):
        assert np.linalg.norm(a[i] @ ad[j] + ad[j] @ a[i] - (i == j) * eye) < ALGEBRA_TOL
        assert np.linalg.norm(a[i] @ a[j] + a[j] @ a[i]) < ALGEBRA_TOL


@pytest.mark.parametrize("n_modes", [1, 3, 5])
def test_nilpotent_and_number_operator(n_modes):
    a, ad = dense_ops(n_modes)
    for m in range(n_modes):
        assert np.linalg.norm(ad[m] @ ad[m]) < ALGEBRA_TOL
        values = np.linalg.eigvalsh(number(m, n_modes).to_dense(n_modes))
        assert np.allclose(np.unique(np.round(values, 12)), [0, 1])


def test_vacuum_is_all_down():
    assert jw_state(OccupationState((), 3)) == (0b111, 1)


def test_one_fermion_in_first_ring_mode():
    assert jw_state(OccupationState({1}, 2)) == (0b10, 1)


def test_ring_occupation_pattern():
    # impurity plus four ring modes, ring modes k0, k1, k3 occupied
    index, sign = jw_state(OccupationState({1, 2, 4}, 5))
    assert format(index, "05b") == "10010"
    assert sign == -1


def build_by_operators(occupied, n_modes):
    state = vacuum(n_modes)
    for m in sorted(occupied):
        state = creation(m, n_modes).to_dense(n_modes) @ state
    return state


@pytest.mark.parametrize("n_modes", [1, 2, 3, 4])
def test_state_matches_operator_construction(n_modes):
    for k in range(n_modes + 1):
        for occ in itertools.combinations(range(n_modes), k):
            expected = build_by_operators(occ, n_modes)
            assert np.linalg.norm(jw_vector(OccupationState(occ, n_modes)) - expected) < ALGEBRA_TOL


def test_occupation_validation():
    with pytest.raises(ValueError):
        OccupationState({3}, 3)
