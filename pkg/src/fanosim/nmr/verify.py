"""Pulse-level simulation of a compiled sequence on the whole spin register."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from ..circuits import Circuit, Gate
from ..operators import X, Y, basis_state, kron_all
from ..simulator import run
from .molecule import Molecule
from .sequence import Delay, Pulse, PulseSequence, VirtualZ

PULSE_BUDGET = 1000
BLOCK_BUDGET = 100


def _z_signs(n: int) -> np.ndarray:
    """``z[b, j] = +1`` if qubit ``j`` is ``|0>`` in basis state ``b``, else ``-1``."""
    bits = (np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return 1 - 2 * bits


def free_energies(m: Molecule, offsets: dict[str, float]) -> np.ndarray:
    """Diagonal of ``sum 2 pi v_j Z_j / 2 + sum_{j<k} 2 pi J_jk Z_j Z_k / 4`` (rad/s)."""
    z = _z_signs(m.n_spins)
    nu = np.array([offsets.get(l, 0.0) for l in m.labels])
    energies = np.pi * (z @ nu)
    j = m.couplings
    for a in range(m.n_spins):
        for b in range(a + 1, m.n_spins):
            if j[a, b] != 0:
                energies += 0.5 * np.pi * j[a, b] * z[:, a] * z[:, b]
    return energies


def _coupling_energies(m: Molecule) -> np.ndarray:
    return free_energies(m, {})


def pulse_unitary(p: Pulse) -> np.ndarray:
    axis = math.cos(p.phase) * X + math.sin(p.phase) * Y
    return math.cos(p.angle / 2) * np.eye(2) - 1j * math.sin(p.angle / 2) * axis


def _apply_single(state: np.ndarray, u: np.ndarray, index: int, n: int) -> np.ndarray:
    tensor = state.reshape((2,) * n)
    tensor = np.moveaxis(np.tensordot(u, tensor, axes=([1], [index])), 0, index)
    return tensor.reshape(-1)


def _permute(state: np.ndarray, labels: Sequence[str], order: Sequence[str]) -> np.ndarray:
    n = len(labels)
    tensor = state.reshape((2,) * n)
    return np.transpose(tensor, [list(labels).index(l) for l in order]).reshape(-1)


def register_state(m: Molecule, circuit_qubits: Sequence[str], state: np.ndarray) -> np.ndarray:
    """Embed a circuit-register state with spectators in their basis states, molecule order."""
    spins = [m.roles[q] for q in circuit_qubits]
    spectators = [l for l in m.labels if l not in spins]
    parts = [np.asarray(state, dtype=complex)] + [basis_state(str(m.spectator_state(s))) for s in spectators]
    return _permute(kron_all(*parts), spins + spectators, m.labels)


def ideal_register_state(m: Molecule, circuit: Circuit, init: np.ndarray) -> np.ndarray:
    return register_state(m, circuit.qubits, run(circuit, init))


@dataclass(frozen=True)
class VerifyReport:
    final_state: np.ndarray
    ideal_state: np.ndarray
    fidelity: float
    labels: tuple[str, ...]


def evolve(
    seq: PulseSequence, m: Molecule, state: np.ndarray, instantaneous: bool = True, frame_correct: bool = True
) -> np.ndarray:
    """Physical evolution of a register state under the sequence.

    Delays evolve under offsets and couplings.  Pulses are instantaneous
    rotations, or, with ``instantaneous=False``, evolve for their duration
    under the RF term plus the couplings.  The final frame table is then
    applied so the result is comparable with the ideal circuit output.
    """
    n = m.n_spins
    energies = free_energies(m, seq.offsets)
    coupling_only = _coupling_energies(m) if not instantaneous else None
    state = np.asarray(state, dtype=complex).copy()
    for e in seq.events:
        if isinstance(e, Delay):
            state = np.exp(-1j * energies * e.duration) * state
        elif isinstance(e, Pulse):
            index = m.index(e.spin)
            if instantaneous:
                state = _apply_single(state, pulse_unitary(e), index, n)
            else:
                axis = math.cos(e.phase) * X + math.sin(e.phase) * Y
                rf = kron_all(*[e.amplitude * axis if k == index else np.eye(2) for k in range(n)])
                state = expm(-1j * e.duration * (rf + np.diag(coupling_only))) @ state
        elif not isinstance(e, VirtualZ):
            raise TypeError(f"unknown event {e!r}")
    if frame_correct:
        for label, angle in seq.frames.items():
            rz = np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
            state = _apply_single(state, rz, m.index(label), n)
    return state


def verify(
    seq: PulseSequence,
    m: Molecule,
    circuit: Circuit,
    init: np.ndarray | None = None,
    instantaneous: bool = True,
) -> VerifyReport:
    """Evolve the full register under ``seq`` and compare with the ideal circuit.

    ``init`` is a state on the circuit qubits (default all ``|0>``);
    spectators start in their configured basis states.  Fidelity is
    ``|<ideal|final>|^2``.
    """
    if m.n_spins > 7:
        raise ValueError("the verifier handles at most 7 spins")
    if init is None:
        init = basis_state("0" * circuit.n_qubits)
    start = register_state(m, circuit.qubits, init)
    final = evolve(seq, m, start, instantaneous)
    ideal = ideal_register_state(m, circuit, init)
    fidelity = float(abs(np.vdot(ideal, final)) ** 2)
    return VerifyReport(final, ideal, fidelity, m.labels)


def sequence_unitary(seq: PulseSequence, m: Molecule, instantaneous: bool = True) -> np.ndarray:
    """Dense frame-corrected unitary of the sequence on the whole register."""
    dim = 2**m.n_spins
    return np.column_stack([evolve(seq, m, col, instantaneous) for col in np.eye(dim, dtype=complex)])


def circuit_on_register(circuit: Circuit, m: Molecule) -> Circuit:
    """The circuit relabelled onto molecule spins."""
    gates = tuple(Gate(g.kind, g.angle, tuple(m.roles[t] for t in g.targets), g.variable) for g in circuit.gates)
    return Circuit(m.labels, gates)


@dataclass(frozen=True)
class BudgetReport:
    pulses: int
    ising_blocks: int
    duration: float
    min_t2star: float
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.warnings


def budget_check(seq: PulseSequence, m: Molecule) -> BudgetReport:
    """Count pulses and Ising blocks and compare the duration with the shortest T2*.

    Only warns; nothing here rejects a sequence.
    """
    pulses = len(seq.pulses)
    blocks = len(seq.blocks)
    duration = seq.duration
    min_t2 = min(s.t2star for s in m.spins)
    warnings = []
    if pulses > PULSE_BUDGET:
        warnings.append(f"{pulses} pulses exceed the budget of {PULSE_BUDGET}")
    if blocks > BLOCK_BUDGET:
        warnings.append(f"{blocks} Ising blocks exceed the budget of {BLOCK_BUDGET}")
    if duration > min_t2:
        warnings.append(f"duration {duration:.4g} s exceeds the shortest T2* of {min_t2:.4g} s")
    return BudgetReport(pulses, blocks, duration, min_t2, tuple(warnings))
