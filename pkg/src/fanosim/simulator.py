"""State-vector and density-matrix execution of circuits, and the experiment drivers."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .circuits import (
    ANCILLA,
    IMPURITY,
    MODE,
    NETWORK_QUBITS,
    Circuit,
    Gate,
    build_cnot_b1,
    build_correlation_network,
    build_spectrum_network,
    hoist_time_dependence,
    rx,
    ry,
)
from .model import EnergyOffset, ModelParams, derive
from .operators import X, Y, basis_state, kron_all, n_qubits_of

Mode = Literal["ideal", "pulse"]


def apply_gate(array: np.ndarray, gate: Gate, qubits: Sequence[str]) -> np.ndarray:
    """Left-multiply a state vector or matrix by ``gate`` embedded in ``qubits``."""
    n = len(qubits)
    axes = [qubits.index(t) for t in gate.targets]
    k = len(axes)
    rest = array.shape[1:]
    tensor = array.reshape((2,) * n + rest)
    small = gate.matrix().reshape((2,) * (2 * k))
    moved = np.tensordot(small, tensor, axes=(list(range(k, 2 * k)), axes))
    moved = np.moveaxis(moved, list(range(k)), axes)
    return moved.reshape(array.shape)


@dataclass(frozen=True)
class PseudoPureState:
    """``(1 - epsilon) I / 2^N + epsilon rho_pure``.

    ``pure`` may be a state vector or a density matrix.  Only the pure part
    evolves under unitaries; the identity part is invariant.
    """

    epsilon: float
    pure: np.ndarray

    def __post_init__(self) -> None:
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"purity fraction must lie in (0, 1], got {self.epsilon}")
        pure = np.asarray(self.pure, dtype=complex)
        n_qubits_of(pure)
        object.__setattr__(self, "pure", pure)

    @property
    def n_qubits(self) -> int:
        return n_qubits_of(self.pure)

    def pure_density(self) -> np.ndarray:
        if self.pure.ndim == 1:
            return np.outer(self.pure, self.pure.conj())
        return self.pure

    def density_matrix(self) -> np.ndarray:
        dim = 2**self.n_qubits
        return (1 - self.epsilon) / dim * np.eye(dim) + self.epsilon * self.pure_density()

    def expectation(self, obs: np.ndarray) -> complex:
        return complex(np.trace(self.density_matrix() @ obs))


State = np.ndarray | PseudoPureState


def run(circuit: Circuit, init: State) -> State:
    """Apply ``circuit`` to a vector, a density matrix or a pseudo-pure state."""
    if isinstance(init, PseudoPureState):
        return PseudoPureState(init.epsilon, run(circuit, init.pure))
    state = np.asarray(init, dtype=complex)
    n = n_qubits_of(state)
    if n != circuit.n_qubits:
        raise ValueError(f"state has {n} qubits, circuit acts on {circuit.n_qubits} ({circuit.qubits})")
    if state.ndim == 1:
        for gate in circuit.gates:
            state = apply_gate(state, gate, circuit.qubits)
        return state
    u = circuit.to_dense()
    return u @ state @ u.conj().T


def _embed(op: np.ndarray, qubits: Sequence[str], label: str) -> np.ndarray:
    if label not in qubits:
        raise ValueError(f"qubit {label!r} not in register {tuple(qubits)}")
    return kron_all(*[op if q == label else np.eye(2) for q in qubits])


def measure_ancilla(state: State, qubits: Sequence[str] = NETWORK_QUBITS, ancilla: str = ANCILLA) -> complex:
    """``<X_a> + i <Y_a>`` on the given register."""
    obs = _embed(X + 1j * Y, qubits, ancilla)
    if isinstance(state, PseudoPureState):
        return state.expectation(obs)
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return complex(np.vdot(state, obs @ state))
    return complex(np.trace(state @ obs))


def network_input() -> np.ndarray:
    """``|0>_a |1 0>``: ancilla unprepared, impurity empty, mode ``k0`` occupied."""
    return basis_state("010")


def prepared_state() -> np.ndarray:
    """``|+>_a |1 0>``, the state every measurement network starts from."""
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    return kron_all(plus, basis_state("10"))


def labeled_initial_density() -> np.ndarray:
    """Traceless labeled input ``|1><1|_a (x) Z_1 (x) |1><1|_2``."""
    one = np.diag([0, 1]).astype(complex)
    return kron_all(one, np.diag([1, -1]).astype(complex), one)


def build_initialization() -> Circuit:
    """Moves polarization from the impurity qubit to the ancilla and flips the mode qubit.

    Maps ``|1><1|_a Z_1 |1><1|_2`` to ``X_a |1><1|_1 |0><0|_2``.
    """
    swap_like = build_cnot_b1(control=IMPURITY, target=ANCILLA).then(build_cnot_b1(control=ANCILLA, target=IMPURITY))
    tail = Circuit(NETWORK_QUBITS, (ry(ANCILLA, -math.pi / 2), rx(MODE, math.pi)), ANCILLA)
    return Circuit(NETWORK_QUBITS, (), ANCILLA).then(swap_like).then(tail)


def prepare_initial(epsilon_pp: float = 1.0) -> tuple[PseudoPureState, Circuit]:
    """Ideal prepared state (as a pseudo-pure state) and the preparation circuit."""
    return PseudoPureState(epsilon_pp, prepared_state()), build_initialization()


@dataclass(frozen=True)
class ExperimentResult:
    """Measured ``<X_a> + i <Y_a>`` on a time grid with per-point standard deviations."""

    t: np.ndarray
    values: np.ndarray
    std_re: np.ndarray
    std_im: np.ndarray
    mode: str = "ideal"
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if t.shape != values.shape or t.ndim != 1:
            raise ValueError("t and values must be 1-d arrays of equal length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "std_re", np.broadcast_to(np.asarray(self.std_re, dtype=float), t.shape).copy())
        object.__setattr__(self, "std_im", np.broadcast_to(np.asarray(self.std_im, dtype=float), t.shape).copy())

    def __len__(self) -> int:
        return self.t.size

    def rows(self) -> list[tuple[float, float, float, float, float, str]]:
        return [
            (float(t), float(v.real), float(v.imag), float(sr), float(si), self.mode)
            for t, v, sr, si in zip(self.t, self.values, self.std_re, self.std_im)
        ]


CSV_COLUMNS = ("t", "re", "im", "std_re", "std_im", "mode")


def time_grid(t_start: float, dt: float, steps: int) -> np.ndarray:
    """``t_start + j dt`` for ``j = 0 .. steps-1``."""
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    if steps < 0:
        raise ValueError(f"step count must be non-negative, got {steps}")
    return t_start + dt * np.arange(steps)


def add_noise(values: np.ndarray, noise_std: float, seed: int | None) -> np.ndarray:
    """Independent Gaussian noise on real then imaginary parts, reproducible from ``seed``."""
    if noise_std < 0:
        raise ValueError("noise standard deviation must be non-negative")
    if noise_std == 0:
        return values
    rng = np.random.default_rng(seed)
    re = rng.normal(0.0, noise_std, values.size)
    im = rng.normal(0.0, noise_std, values.size)
    return values + re + 1j * im


def normalize_to_reference(result: ExperimentResult, reference: complex) -> ExperimentResult:
    """Divide a scan by the reference signal of the prepared state."""
    if reference == 0:
        raise ValueError("reference signal is zero")
    scale = abs(reference)
    return ExperimentResult(
        result.t, result.values / reference, result.std_re / scale, result.std_im / scale, result.mode, result.metadata
    )


def reference_signal(epsilon_pp: float = 1.0) -> complex:
    """Ancilla signal of the freshly prepared state; 1 for an ideal pure preparation."""
    state, _ = prepare_initial(epsilon_pp)
    return measure_ancilla(state)


def _measure_network(
    circuit: Circuit,
    mode: Mode,
    molecule,
    compile_options,
    dephasing: bool,
) -> tuple[complex, dict]:
    if mode == "ideal":
        return measure_ancilla(run(circuit, network_input())), {}
    if mode != "pulse":
        raise ValueError(f"mode must be 'ideal' or 'pulse', got {mode!r}")
    if molecule is None:
        raise ValueError("pulse mode requires a molecule")
    from .nmr.compiler import compile_circuit
    from .nmr.verify import verify

    seq = compile_circuit(circuit, molecule, compile_options)
    report = verify(seq, molecule, circuit, init=network_input())
    value = measure_ancilla(report.final_state, report.labels, molecule.roles[circuit.ancilla or ANCILLA])
    if dephasing:
        spin = molecule.spin(molecule.roles[circuit.ancilla or ANCILLA])
        value *= math.exp(-seq.duration / spin.t2star)
    return value, {"duration": seq.duration, "fidelity": report.fidelity}


def _run_experiment(
    builder,
    grid: np.ndarray,
    mode: Mode,
    noise_std: float,
    seed: int | None,
    molecule,
    compile_options,
    dephasing: bool,
) -> ExperimentResult:
    grid = np.asarray(grid, dtype=float)
    values = np.empty(grid.size, dtype=complex)
    durations, fidelities = [], []
    for j, t in enumerate(grid):
        circuit = hoist_time_dependence(builder(float(t)))
        values[j], info = _measure_network(circuit, mode, molecule, compile_options, dephasing)
        if info:
            durations.append(info["duration"])
            fidelities.append(info["fidelity"])
    values = add_noise(values, noise_std, seed)
    meta = {"seed": seed, "noise_std": noise_std}
    if durations:
        meta.update(durations=durations, fidelities=fidelities)
    return ExperimentResult(grid, values, noise_std, noise_std, mode, meta)


def run_correlation_experiment(
    p: ModelParams,
    grid: np.ndarray,
    mode: Mode = "ideal",
    noise_std: float = 0.0,
    seed: int | None = 0,
    molecule=None,
    compile_options=None,
    dephasing: bool = False,
) -> ExperimentResult:
    """Impurity correlation measured through the ancilla network at each grid time."""
    d = derive(p, degenerate="limit")
    return _run_experiment(
        lambda t: build_correlation_network(t, d), grid, mode, noise_std, seed, molecule, compile_options, dephasing
    )


def run_spectrum_experiment(
    p: ModelParams,
    grid: np.ndarray,
    mode: Mode = "ideal",
    noise_std: float = 0.0,
    seed: int | None = 0,
    molecule=None,
    compile_options=None,
    dephasing: bool = False,
    energy_offset: EnergyOffset = "mean",
) -> ExperimentResult:
    """Return-amplitude signal of the ``k0`` state measured through the ancilla network."""
    d = derive(p, degenerate="limit")
    return _run_experiment(
        lambda t: build_spectrum_network(t, p, d, energy_offset),
        grid,
        mode,
        noise_std,
        seed,
        molecule,
        compile_options,
        dephasing,
    )
