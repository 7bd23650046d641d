"""Impurity-ring fermion Hamiltonian, its two-qubit reduction and exact oracles.

The oracles here are deliberately brute force (dense matrices and
eigendecomposition) so that the circuit constructions elsewhere can be
checked against something that shares none of their algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .jordan_wigner import OccupationState, annihilation, creation, jw_vector
from .operators import PauliSum, exp_hermitian, pauli

EnergyOffset = Literal["mean", "sum"]


class DegenerateCouplingError(ValueError):
    """Raised when the mixing angle is requested at zero coupling."""


@dataclass(frozen=True)
class ModelParams:
    """Impurity energy, coupled-mode energy, coupling, hopping and ring size.

    ``epsilon_k0`` is given explicitly; the remaining ring modes (only
    used when ``n > 1``) take the tight-binding energies
    ``-2 tau cos(2 pi l / n)``.
    """

    epsilon: float
    epsilon_k0: float
    V: float
    tau: float = 1.0
    n: int = 1

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"ring size n must be a positive int, got {self.n!r}")
        for name in ("epsilon", "epsilon_k0", "V", "tau"):
            value = getattr(self, name)
            if isinstance(value, complex) or not math.isfinite(value):
                raise ValueError(f"{name} must be a finite real number, got {value!r}")

    @property
    def n_modes(self) -> int:
        return self.n + 1

    def mode_energies(self) -> np.ndarray:
        """Conduction-mode energies, ``k0`` first."""
        rest = [-2.0 * self.tau * math.cos(2 * math.pi * l / self.n) for l in range(1, self.n)]
        return np.array([self.epsilon_k0, *rest])


# reference parameter sets used by the experiment drivers and the CLI
CORRELATION_SET_A = ModelParams(epsilon=-8.0, epsilon_k0=-2.0, V=4.0)
CORRELATION_SET_B = ModelParams(epsilon=0.0, epsilon_k0=-2.0, V=4.0)
SPECTRUM_SET = ModelParams(epsilon=-8.0, epsilon_k0=-2.0, V=0.5)


@dataclass(frozen=True)
class DerivedParams:
    mean_energy: float
    detuning: float
    splitting: float
    rate1: float
    rate2: float
    mixing_ratio: float
    mixing_angle: float

    @property
    def cos_angle(self) -> float:
        return math.cos(self.mixing_angle)


def derive(p: ModelParams, degenerate: Literal["raise", "limit"] = "raise") -> DerivedParams:
    """Mean energy, detuning, splitting, the two rotation rates and the mixing angle.

    At ``V = 0`` the mixing ratio is undefined.  ``degenerate="raise"``
    signals this with :class:`DegenerateCouplingError`; ``"limit"`` takes the
    ``V -> 0+`` limit, which is what a driver sweeping through the
    decoupled point wants.
    """
    mean = 0.5 * (p.epsilon + p.epsilon_k0)
    detuning = 0.5 * (p.epsilon - p.epsilon_k0)
    splitting = math.hypot(detuning, p.V)
    rate1 = 0.5 * (mean - splitting)
    rate2 = 0.5 * (mean + splitting)
    if p.V != 0:
        ratio = (detuning + splitting) / p.V
        angle = math.atan(ratio)
    elif degenerate == "limit":
        if detuning < 0:
            ratio, angle = 0.0, 0.0
        elif detuning == 0:
            ratio, angle = 1.0, math.pi / 4
        else:
            ratio, angle = math.inf, math.pi / 2
    else:
        raise DegenerateCouplingError("mixing angle is undefined at zero coupling V = 0")
    return DerivedParams(mean, detuning, splitting, rate1, rate2, ratio, angle)


def build_full_hamiltonian(p: ModelParams) -> PauliSum:
    """Spin form of the impurity-ring Hamiltonian on ``n + 1`` qubits."""
    n_modes = p.n_modes
    energies = [p.epsilon, *p.mode_energies()]
    h = PauliSum()
    for mode, energy in enumerate(energies):
        h = h + energy * (creation(mode, n_modes) * annihilation(mode, n_modes))
    hop = creation(1, n_modes) * annihilation(0, n_modes)
    h = h + p.V * (hop + hop.adjoint())
    return h.simplify()


def reduce_two_qubit(p: ModelParams) -> PauliSum:
    """Traceless two-qubit part of the single-site Hamiltonian."""
    return (
        pauli("Z", 0, p.epsilon / 2)
        + pauli("Z", 1, p.epsilon_k0 / 2)
        + (p.V / 2) * (pauli("X", 0) * pauli("X", 1) + pauli("Y", 0) * pauli("Y", 1))
    )


def one_particle_spectrum(p: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Single-fermion eigenvalues and their overlap weights with the ``k0`` state.

    Returns ascending eigenvalues and ``|<k0|P_i>|^2`` for each.
    """
    energies = np.array([p.epsilon, *p.mode_energies()])
    h1 = np.diag(energies).astype(float)
    h1[0, 1] = h1[1, 0] = p.V
    values, vectors = np.linalg.eigh(h1)
    return values, np.abs(vectors[1, :]) ** 2


def initial_state(p: ModelParams) -> np.ndarray:
    """One fermion in mode ``k0``, impurity empty: ``c+_k0 |vac>``."""
    return jw_vector(OccupationState({1}, p.n_modes))


def _check_normalized(state: np.ndarray) -> None:
    if abs(np.linalg.norm(state) - 1.0) > 1e-12:
        raise RuntimeError("initial state is not normalized")


def oracle_correlation(p: ModelParams, t: float | np.ndarray) -> complex | np.ndarray:
    """``<FS| b(t) b+(0) |FS>`` by dense evolution under the full Hamiltonian."""
    n_modes = p.n_modes
    h = build_full_hamiltonian(p).to_dense(n_modes)
    b = annihilation(0, n_modes).to_dense(n_modes)
    fs = initial_state(p)
    _check_normalized(fs)
    excited = b.conj().T @ fs

    def one(time: float) -> complex:
        u = exp_hermitian(h, time)
        return complex(np.vdot(u @ fs, b @ (u @ excited)))

    if np.ndim(t) == 0:
        return one(float(t))
    return np.array([one(float(x)) for x in np.asarray(t)])


def correlation_closed_form(p: ModelParams, t: float | np.ndarray) -> complex | np.ndarray:
    """Analytic single-site correlation ``e^{-iEt}[cos(Wt) - i (D/W) sin(Wt)]``."""
    d = derive(p, degenerate="limit")
    t = np.asarray(t, dtype=float)
    if d.splitting == 0:
        value = np.exp(-1j * d.mean_energy * t) * np.ones_like(t)
    else:
        w = d.splitting
        value = np.exp(-1j * d.mean_energy * t) * (np.cos(w * t) - 1j * (d.detuning / w) * np.sin(w * t))
    return complex(value) if value.ndim == 0 else value


def energy_offset_value(p: ModelParams, energy_offset: EnergyOffset = "mean") -> float:
    """Constant added to the traceless two-qubit part.

    ``"mean"`` is the constant the fermion-to-spin map actually produces,
    ``(eps + eps_k0)/2``; ``"sum"`` keeps the full ``eps + eps_k0`` for
    comparison with the alternative prefactor.
    """
    if energy_offset == "mean":
        return 0.5 * (p.epsilon + p.epsilon_k0)
    if energy_offset == "sum":
        return p.epsilon + p.epsilon_k0
    raise ValueError(f"energy_offset must be 'mean' or 'sum', got {energy_offset!r}")


def oracle_spectrum_signal(
    p: ModelParams, t: float | np.ndarray, energy_offset: EnergyOffset = "mean"
) -> complex | np.ndarray:
    """``<phi| exp(-i H t) |phi>`` with ``phi`` the ``k0``-occupied state.

    With the default offset this is the full single-site Hamiltonian, whose
    one-particle eigenvalues are the frequencies the spectrum recovers.
    Only ``n = 1`` is supported.
    """
    if p.n != 1:
        raise ValueError("the spectrum oracle is defined for a single ring site (n = 1)")
    h = reduce_two_qubit(p).to_dense(2) + energy_offset_value(p, energy_offset) * np.eye(4)
    phi = initial_state(p)
    _check_normalized(phi)

    def one(time: float) -> complex:
        return complex(np.vdot(phi, exp_hermitian(h, time) @ phi))

    if np.ndim(t) == 0:
        return one(float(t))
    return np.array([one(float(x)) for x in np.asarray(t)])
