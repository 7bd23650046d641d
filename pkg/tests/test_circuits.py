from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import model_params, times
from fanosim.circuits import (
    ANCILLA,
    IMPURITY,
    NETWORK_QUBITS,
    Circuit,
    build_cnot_a0,
    build_cnot_b1,
    build_correlation_network,
    build_evolution,
    build_spectrum_network,
    build_U,
    controlled_x,
    hoist_gate,
    hoist_time_dependence,
    ising,
    rx,
    ry,
    rz,
)
from fanosim.constants import ALGEBRA_TOL, DECOMPOSITION_TOL, ORACLE_TOL
from fanosim.model import (
    CORRELATION_SET_A,
    SPECTRUM_SET,
    ModelParams,
    derive,
    oracle_correlation,
    oracle_spectrum_signal,
    reduce_two_qubit,
)
from fanosim.operators import X, Y, Z, basis_state, exp_hermitian, is_unitary, kron_all, phase_distance
from fanosim.simulator import measure_ancilla, network_input, run

angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi, allow_nan=False)


def test_rotation_matrices():
    assert np.allclose(rx("q", math.pi).matrix(), -1j * X, atol=ALGEBRA_TOL)
    assert np.allclose(ry("q", math.pi).matrix(), -1j * Y, atol=ALGEBRA_TOL)
    assert np.allclose(rz("q", math.pi / 2).matrix(), np.diag(np.exp([-0.25j * math.pi, 0.25j * math.pi])))


def test_ising_matrix_is_exponential_of_zz():
    angle = 0.37
    expected = exp_hermitian(np.kron(Z, Z), angle / 2)
    assert np.allclose(ising("a", "b", angle).matrix(), expected, atol=ALGEBRA_TOL)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["x", "y", "z", "zz"]), angles, angles)
def test_rotation_group_property(kind, a, b):
    def make(angle):
        return {"x": rx("q", angle), "y": ry("q", angle), "z": rz("q", angle), "zz": ising("q", "r", angle)}[kind]

    combined = make(a).matrix() @ make(b).matrix()
    assert np.allclose(combined, make(a + b).matrix(), atol=ALGEBRA_TOL)
    assert np.allclose(make(a).matrix() @ make(-a).matrix(), np.eye(combined.shape[0]), atol=ALGEBRA_TOL)


def test_gate_validation():
    with pytest.raises(ValueError):
        ising("a", "a", 0.1)
    with pytest.raises(ValueError):
        rx("a", float("inf"))
    with pytest.raises(ValueError):
        Circuit(("a",), (rx("b", 0.1),))


def test_gate_order_is_time_order():
    c = Circuit(("q",), (rx("q", math.pi / 2), rz("q", math.pi / 3)))
    expected = rz("q", math.pi / 3).matrix() @ rx("q", math.pi / 2).matrix()
    assert np.allclose(c.to_dense(), expected, atol=ALGEBRA_TOL)


def test_first_qubit_is_most_significant():
    c = Circuit(("a", "b"), (rx("a", math.pi),))
    assert np.allclose(c.to_dense(), kron_all(rx("a", math.pi).matrix(), np.eye(2)))


@settings(max_examples=50, deadline=None)
@given(model_params())
def test_U_diagonalizes_reduced_hamiltonian(p):
    d = derive(p)
    u = build_U(d.mixing_angle).to_dense()
    h = reduce_two_qubit(p).to_dense(2)
    diagonal = u.conj().T @ h @ u
    expected = np.kron(d.rate1 * Z, np.eye(2)) + np.kron(np.eye(2), d.rate2 * Z)
    assert np.allclose(diagonal, expected, atol=DECOMPOSITION_TOL * max(1, d.splitting))


@settings(max_examples=50, deadline=None)
@given(model_params(), times)
def test_evolution_matches_exponential(p, t):
    d = derive(p)
    exact = exp_hermitian(reduce_two_qubit(p).to_dense(2), t)
    assert phase_distance(build_evolution(t, d).to_dense(), exact) < DECOMPOSITION_TOL
    assert len(build_U(d.mixing_angle).gates) == 10


def test_evolution_is_unitary_and_identity_at_zero():
    d = derive(CORRELATION_SET_A)
    assert is_unitary(build_evolution(1.3, d).to_dense())
    assert phase_distance(build_evolution(0.0, d).to_dense(), np.eye(4)) < ALGEBRA_TOL


@pytest.mark.parametrize("builder, control_value", [(build_cnot_a0, 0), (build_cnot_b1, 1)])
def test_controlled_x_decompositions(builder, control_value):
    assert phase_distance(builder().to_dense(), controlled_x(control_value)) < DECOMPOSITION_TOL


def test_one_controlled_x_idles_on_zero_control():
    u = build_cnot_b1().to_dense()
    for target in "01":
        psi = basis_state("0" + target)
        assert abs(abs(np.vdot(psi, u @ psi)) - 1) < DECOMPOSITION_TOL


def test_both_controlled_x_together_flip_target():
    both = build_cnot_b1().then(build_cnot_a0()).to_dense()
    assert phase_distance(both, np.kron(np.eye(2), X)) < DECOMPOSITION_TOL


@pytest.mark.parametrize("t", [0.0, 0.2, math.pi / 10, 0.9, 2.5])
def test_correlation_relations(t):
    # T is the pair evolution; phi = |1 0> on (impurity, mode)
    d = derive(CORRELATION_SET_A)
    T = build_evolution(t, d).to_dense()
    phi = basis_state("10")
    x1, y1 = np.kron(X, np.eye(2)), np.kron(Y, np.eye(2))

    def corr(a, b):
        return np.vdot(phi, T.conj().T @ a @ T @ b @ phi)

    xx = corr(x1, x1)
    assert abs(corr(x1, y1) + 1j * xx) < ORACLE_TOL
    assert abs(corr(y1, x1) - 1j * xx) < ORACLE_TOL
    assert abs(corr(y1, y1) - xx) < ORACLE_TOL
    assert abs(xx - oracle_correlation(CORRELATION_SET_A, t)) < ORACLE_TOL


@pytest.mark.parametrize("params", [CORRELATION_SET_A, ModelParams(0.0, -2.0, 4.0), ModelParams(1.1, 0.4, -0.6)])
@pytest.mark.parametrize("t", [0.0, 0.3, 1.7])
def test_correlation_network_measures_correlation(params, t):
    c = build_correlation_network(t, derive(params))
    value = measure_ancilla(run(c, network_input()))
    assert abs(value - oracle_correlation(params, t)) < ORACLE_TOL


@pytest.mark.parametrize("offset", ["mean", "sum"])
@pytest.mark.parametrize("t", [0.0, 0.45, 3.1])
def test_spectrum_network_measures_return_amplitude(offset, t):
    p = SPECTRUM_SET
    c = build_spectrum_network(t, p, derive(p), offset)
    assert abs(measure_ancilla(run(c, network_input())) - oracle_spectrum_signal(p, t, offset)) < ORACLE_TOL


def test_network_at_zero_time_gives_one():
    d = derive(CORRELATION_SET_A)
    assert abs(measure_ancilla(run(build_correlation_network(0.0, d), network_input())) - 1) < ORACLE_TOL


@pytest.mark.parametrize("t", [0.0, 0.7, 2.2])
def test_decoupled_spectrum_signal_has_unit_modulus(t):
    p = ModelParams(-8, -2, 0)
    c = build_spectrum_network(t, p, derive(p, degenerate="limit"))
    assert abs(abs(measure_ancilla(run(c, network_input()))) - 1) < ORACLE_TOL


@settings(max_examples=40, deadline=None)
@given(angles)
def test_hoisted_gate_equals_original(angle):
    gate = ising(IMPURITY, ANCILLA, angle, variable=True)
    original = Circuit(("1", "a"), (gate,)).to_dense()
    hoisted = Circuit(("1", "a"), tuple(hoist_gate(gate))).to_dense()
    assert np.allclose(hoisted, original, atol=ALGEBRA_TOL)


def test_hoist_rejects_fixed_gate():
    with pytest.raises(ValueError):
        hoist_gate(ising("a", "b", 0.3))
    with pytest.raises(ValueError):
        hoist_gate(rx("a", 0.3))


def test_hoisted_networks_share_structure():
    p = SPECTRUM_SET
    d = derive(p)
    grid = [0.1 * j for j in range(1, 20)]
    hoisted = [hoist_time_dependence(build_spectrum_network(t, p, d)) for t in grid]
    assert all(not g.variable for g in hoisted[0].gates)
    assert len({h.skeleton() for h in hoisted}) == 1
    for t, h in zip(grid[:3], hoisted):
        assert np.allclose(h.to_dense(), build_spectrum_network(t, p, d).to_dense(), atol=ALGEBRA_TOL)


def test_network_registers():
    c = build_spectrum_network(0.3, SPECTRUM_SET, derive(SPECTRUM_SET))
    assert c.qubits == NETWORK_QUBITS
    assert c.ancilla == ANCILLA


def test_text_round_trip():
    c = build_spectrum_network(0.77, SPECTRUM_SET, derive(SPECTRUM_SET))
    assert Circuit.loads(c.dumps()) == c
    assert "@t" in c.dumps()


def test_text_errors():
    with pytest.raises(ValueError):
        Circuit.loads("rot_x 0.1 a\n")
    with pytest.raises(ValueError):
        Circuit.loads("qubits a\nflip a\n")


def test_inverse_circuit():
    c = build_U(0.4)
    assert np.allclose(c.inverse().to_dense() @ c.to_dense(), np.eye(4), atol=ALGEBRA_TOL)
