"""Pauli-string algebra and dense linear-algebra helpers.

Qubit 0 is the most significant bit everywhere in this package, so the
dense form of ``X0 Z1`` is ``kron(X, Z)`` and the basis state ``|01>`` has
index 1.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from functools import reduce
from numbers import Number

import numpy as np

from .constants import ALGEBRA_TOL, HERMITIAN_TOL

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_MATRICES = {"I": I2, "X": X, "Y": Y, "Z": Z}

_AXES = ("X", "Y", "Z")
_UNIT_PHASES = (1, -1, 1j, -1j)

# single-site products: (a, b) -> (phase, c) with a.b = phase * c
_PRODUCT = {
    ("X", "X"): (1, "I"),
    ("Y", "Y"): (1, "I"),
    ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}


def _snap_phase(phase: complex) -> complex:
    for unit in _UNIT_PHASES:
        if abs(phase - unit) < ALGEBRA_TOL:
            return complex(unit)
    raise ValueError(f"PauliString phase must be one of +-1, +-i, got {phase!r}")


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Pauli factors with a unit phase.

    ``factors`` holds ``(qubit, axis)`` pairs sorted by qubit; absent qubits
    carry the identity.
    """

    factors: tuple[tuple[int, str], ...] = ()
    phase: complex = 1

    def __post_init__(self) -> None:
        seen: dict[int, str] = {}
        for qubit, axis in self.factors:
            if axis not in _AXES:
                raise ValueError(f"unknown Pauli axis {axis!r}")
            if int(qubit) != qubit or qubit < 0:
                raise ValueError(f"qubit index must be a non-negative int, got {qubit!r}")
            if qubit in seen:
                raise ValueError(f"qubit {qubit} appears twice")
            seen[int(qubit)] = axis
        object.__setattr__(self, "factors", tuple(sorted(seen.items())))
        object.__setattr__(self, "phase", _snap_phase(complex(self.phase)))

    @classmethod
    def from_map(cls, mapping: Mapping[int, str], phase: complex = 1) -> PauliString:
        return cls(tuple((q, a) for q, a in mapping.items() if a != "I"), phase)

    @classmethod
    def single(cls, axis: str, qubit: int) -> PauliString:
        return cls.from_map({qubit: axis})

    def axis(self, qubit: int) -> str:
        return dict(self.factors).get(qubit, "I")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    @property
    def min_qubits(self) -> int:
        return self.factors[-1][0] + 1 if self.factors else 0

    def stripped(self) -> PauliString:
        """Same factors with phase +1."""
        return PauliString(self.factors)

    def __mul__(self, other: PauliString) -> PauliString:
        if not isinstance(other, PauliString):
            return NotImplemented
        phase = self.phase * other.phase
        left = dict(self.factors)
        for qubit, axis in other.factors:
            if qubit in left:
                p, res = _PRODUCT[(left[qubit], axis)]
                phase *= p
                if res == "I":
                    del left[qubit]
                else:
                    left[qubit] = res
            else:
                left[qubit] = axis
        return PauliString.from_map(left, phase)

    def to_dense(self, n_qubits: int) -> np.ndarray:
        if self.min_qubits > n_qubits:
            raise IndexError(f"qubit index {self.min_qubits - 1} out of range for {n_qubits} qubits")
        mats = [PAULI_MATRICES[self.axis(q)] for q in range(n_qubits)]
        return self.phase * reduce(np.kron, mats, np.eye(1, dtype=complex))

    def __str__(self) -> str:
        body = " ".join(f"{a}{q}" for q, a in self.factors) or "I"
        prefix = {1: "", -1: "-", 1j: "i ", -1j: "-i "}[self.phase]
        return prefix + body


Term = tuple[complex, PauliString]


class PauliSum:
    """Linear combination of Pauli strings.

    Terms with the same factors are merged on construction and exact zeros
    are dropped, so every stored string is distinct and has phase +1.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[Term] = ()) -> None:
        acc: dict[tuple[tuple[int, str], ...], complex] = {}
        for coeff, string in terms:
            key = string.factors
            acc[key] = acc.get(key, 0j) + complex(coeff) * string.phase
        self._terms = {k: v for k, v in acc.items() if abs(v) > 1e-15}

    @classmethod
    def from_string(cls, string: PauliString, coeff: complex = 1.0) -> PauliSum:
        return cls([(coeff, string)])

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> PauliSum:
        return cls([(coeff, PauliString())])

    @property
    def terms(self) -> tuple[Term, ...]:
        return tuple((c, PauliString(k)) for k, c in sorted(self._terms.items()))

    def coefficient(self, string: PauliString | Mapping[int, str]) -> complex:
        if not isinstance(string, PauliString):
            string = PauliString.from_map(string)
        return self._terms.get(string.factors, 0j) * string.phase.conjugate()

    @property
    def min_qubits(self) -> int:
        return max((PauliString(k).min_qubits for k in self._terms), default=0)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def __add__(self, other: PauliSum | Number) -> PauliSum:
        if isinstance(other, Number):
            other = PauliSum.identity(other)
        if not isinstance(other, PauliSum):
            return NotImplemented
        return PauliSum(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> PauliSum:
        return PauliSum((-c, s) for c, s in self.terms)

    def __sub__(self, other: PauliSum | Number) -> PauliSum:
        return self + (-other)

    def __rsub__(self, other: Number) -> PauliSum:
        return (-self) + other

    def __mul__(self, other: PauliSum | PauliString | Number) -> PauliSum:
        if isinstance(other, Number):
            return PauliSum((c * other, s) for c, s in self.terms)
        if isinstance(other, PauliString):
            other = PauliSum.from_string(other)
        if not isinstance(other, PauliSum):
            return NotImplemented
        return PauliSum((c1 * c2, s1 * s2) for c1, s1 in self.terms for c2, s2 in other.terms)

    def __rmul__(self, other: Number) -> PauliSum:
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._terms == other._terms

    def isclose(self, other: PauliSum, tol: float = ALGEBRA_TOL) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(k, 0) - other._terms.get(k, 0)) < tol for k in keys)

    def adjoint(self) -> PauliSum:
        return PauliSum((c.conjugate(), s) for c, s in self.terms)

    def is_hermitian(self, tol: float = ALGEBRA_TOL) -> bool:
        return all(abs(c.imag) < tol for c in self._terms.values())

    def simplify(self, tol: float = ALGEBRA_TOL) -> PauliSum:
        return PauliSum((c, s) for c, s in self.terms if abs(c) > tol)

    def to_dense(self, n_qubits: int | None = None) -> np.ndarray:
        return to_dense(self, self.min_qubits if n_qubits is None else n_qubits)

    def __repr__(self) -> str:
        return f"PauliSum({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"({_fmt_complex(c)}) {s}" for c, s in self.terms)

    __hash__ = None  # type: ignore[assignment]


def _fmt_complex(c: complex) -> str:
    if abs(c.imag) < ALGEBRA_TOL:
        return f"{c.real:g}"
    if abs(c.real) < ALGEBRA_TOL:
        return f"{c.imag:g}j"
    return f"{c.real:g}{c.imag:+g}j"


def pauli(axis: str, qubit: int, coeff: complex = 1.0) -> PauliSum:
    """Single Pauli factor as a sum, e.g. ``pauli("Z", 0)``."""
    if axis == "I":
        return PauliSum.identity(coeff)
    return PauliSum.from_string(PauliString.single(axis, qubit), coeff)


def sigma_plus(qubit: int) -> PauliSum:
    """Raising operator ``|0><1| = (X + iY)/2``."""
    return 0.5 * (pauli("X", qubit) + pauli("Y", qubit, 1j))


def sigma_minus(qubit: int) -> PauliSum:
    """Lowering operator ``|1><0| = (X - iY)/2``."""
    return 0.5 * (pauli("X", qubit) + pauli("Y", qubit, -1j))


def to_dense(op: PauliSum, n_qubits: int) -> np.ndarray:
    """Exact Kronecker expansion of ``op`` on ``n_qubits`` qubits."""
    if op.min_qubits > n_qubits:
        raise IndexError(f"operator acts on qubit {op.min_qubits - 1}, register has {n_qubits}")
    out = np.zeros((2**n_qubits, 2**n_qubits), dtype=complex)
    for coeff, string in op.terms:
        out += coeff * string.to_dense(n_qubits)
    return out


def n_qubits_of(array: np.ndarray) -> int:
    """Qubit count of a state vector or square operator; rejects non powers of two."""
    dim = array.shape[0]
    if array.ndim == 2 and array.shape[1] != dim:
        raise ValueError(f"operator must be square, got shape {array.shape}")
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def is_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.linalg.norm(matrix - matrix.conj().T) < tol)


def is_unitary(matrix: np.ndarray, tol: float = ALGEBRA_TOL) -> bool:
    eye = np.eye(matrix.shape[0])
    return bool(np.linalg.norm(matrix.conj().T @ matrix - eye) < tol)


def exp_hermitian(op: np.ndarray, scale: float) -> np.ndarray:
    """Return ``exp(-i * scale * op)`` for Hermitian ``op`` via eigendecomposition.

    This is the brute-force reference that every gate decomposition in the
    package is checked against.
    """
    op = np.asarray(op, dtype=complex)
    n_qubits_of(op)
    if not is_hermitian(op):
        raise ValueError("exp_hermitian requires a Hermitian operator")
    herm = 0.5 * (op + op.conj().T)
    w, v = np.linalg.eigh(herm)
    return (v * np.exp(-1j * scale * w)) @ v.conj().T


def expectation(state: np.ndarray, obs: PauliSum | np.ndarray) -> complex:
    """``<psi|obs|psi>`` for a state vector."""
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state)
    mat = obs.to_dense(n) if isinstance(obs, PauliSum) else np.asarray(obs)
    if mat.shape != (state.size, state.size):
        raise ValueError(f"observable shape {mat.shape} does not match state of dimension {state.size}")
    return complex(np.vdot(state, mat @ state))


def basis_state(bits: str | Sequence[int]) -> np.ndarray:
    """Computational basis vector, ``bits[0]`` being qubit 0 (most significant)."""
    bits = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0 or 1")
    index = int("".join(map(str, bits)) or "0", 2)
    out = np.zeros(2 ** len(bits), dtype=complex)
    out[index] = 1.0
    return out


def kron_all(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of vectors or of matrices, left factor most significant."""
    if not factors:
        raise ValueError("kron_all needs at least one factor")
    return reduce(np.kron, factors[1:], np.asarray(factors[0], dtype=complex))


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_phi ||a - exp(i phi) b||`` (Frobenius), i.e. distance modulo global phase."""
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))
