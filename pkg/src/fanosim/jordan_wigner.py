"""Jordan-Wigner map from impurity/ring fermion modes to qubits.

Mode 0 is the impurity and lives on qubit 0; conduction mode ``k_l`` is
mode ``l + 1`` on qubit ``l + 1``.  Each parity-string factor is ``-Z``
rather than ``+Z``, and an occupied mode is the qubit state ``|0>`` (spin
up), so the fermionic vacuum is ``|11...1>``.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .operators import PauliSum, pauli, sigma_minus, sigma_plus


@dataclass(frozen=True)
class FermionOp:
    """Single creation (``dagger=True``) or annihilation operator on ``mode``."""

    mode: int
    dagger: bool = False

    def __post_init__(self) -> None:
        if int(self.mode) != self.mode or self.mode < 0:
            raise ValueError(f"mode must be a non-negative int, got {self.mode!r}")

    def label(self) -> str:
        name = "b" if self.mode == 0 else f"c_k{self.mode - 1}"
        return name + ("+" if self.dagger else "")


@dataclass(frozen=True)
class OccupationState:
    occupied: frozenset[int]
    n_modes: int

    def __init__(self, occupied: Iterable[int], n_modes: int) -> None:
        occ = frozenset(int(m) for m in occupied)
        if n_modes < 1:
            raise ValueError("n_modes must be at least 1")
        bad = [m for m in occ if not 0 <= m < n_modes]
        if bad:
            raise ValueError(f"occupied modes {sorted(bad)} out of range for {n_modes} modes")
        object.__setattr__(self, "occupied", occ)
        object.__setattr__(self, "n_modes", int(n_modes))


def _check_mode(mode: int, n_modes: int) -> None:
    if not 0 <= mode < n_modes:
        raise ValueError(f"mode {mode} out of range for {n_modes} modes")


def parity_string(mode: int) -> PauliSum:
    """Product of ``-Z`` over every qubit below ``mode``."""
    out = PauliSum.identity()
    for j in range(mode):
        out = out * pauli("Z", j, -1.0)
    return out


def jw_map(op: FermionOp, n_modes: int) -> PauliSum:
    """Pauli form of a fermion operator on an ``n_modes`` register."""
    _check_mode(op.mode, n_modes)
    ladder = sigma_plus(op.mode) if op.dagger else sigma_minus(op.mode)
    return parity_string(op.mode) * ladder


def annihilation(mode: int, n_modes: int) -> PauliSum:
    return jw_map(FermionOp(mode, False), n_modes)


def creation(mode: int, n_modes: int) -> PauliSum:
    return jw_map(FermionOp(mode, True), n_modes)


def number(mode: int, n_modes: int) -> PauliSum:
    """Occupation number ``c+ c`` = ``(1 + Z)/2`` on the mode's qubit."""
    return creation(mode, n_modes) * annihilation(mode, n_modes)


def jw_state(occ: OccupationState) -> tuple[int, int]:
    """Basis index and sign of the mapped occupation state.

    The state is built by applying creation operators to the vacuum in
    ascending mode order, so each creator picks up ``-1`` for every
    already-occupied mode beneath it.
    """
    bits = [1] * occ.n_modes
    sign = 1
    for mode in sorted(occ.occupied):
        sign *= (-1) ** sum(1 for j in range(mode) if bits[j] == 0)
        bits[mode] = 0
    index = int("".join(map(str, bits)), 2)
    return index, sign


def jw_vector(occ: OccupationState) -> np.ndarray:
    """Dense state vector of ``jw_state`` including its sign."""
    index, sign = jw_state(occ)
    out = np.zeros(2**occ.n_modes, dtype=complex)
    out[index] = sign
    return out


def vacuum(n_modes: int) -> np.ndarray:
    return jw_vector(OccupationState((), n_modes))


def describe(op: PauliSum) -> str:
    """Human-readable form, recognising a bare single-qubit ladder operator.

    Qubits are shown 1-based to match the impurity/mode numbering used in
    the command-line output.
    """
    for q in range(op.min_qubits):
        if op.isclose(sigma_plus(q)):
            return f"σ₊ on qubit {q + 1}"
        if op.isclose(sigma_minus(q)):
            return f"σ₋ on qubit {q + 1}"
    return " + ".join(_describe_term(c, s) for c, s in op.terms) or "0"


def _describe_term(coeff: complex, string) -> str:
    body = " ".join(f"{a}{q + 1}" for q, a in string.factors) or "I"
    if abs(coeff.imag) < 1e-12:
        return f"({coeff.real:g}) {body}"
    if abs(coeff.real) < 1e-12:
        return f"({coeff.imag:g}i) {body}"
    return f"({coeff.real:g}{coeff.imag:+g}i) {body}"
