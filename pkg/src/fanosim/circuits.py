"""Gate-level circuits on named qubits and the measurement networks built from them.

Gates follow ``R_mu(angle) = exp(-i angle sigma_mu / 2)`` and
``ising_zz(angle) = exp(-i (angle/2) Z Z)``.  A circuit's gate list is in
time order: the first gate acts first.  The default labels are ``"a"``
for the ancilla, ``"1"`` for the impurity qubit and ``"2"`` for the
coupled conduction mode.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .model import DerivedParams, EnergyOffset, ModelParams, energy_offset_value
from .operators import X, Y, Z

GATE_KINDS = ("rot_x", "rot_y", "rot_z", "ising_zz")
ANCILLA, IMPURITY, MODE = "a", "1", "2"
HALF_PI = math.pi / 2


@dataclass(frozen=True)
class Gate:
    """One elementary gate.

    ``variable`` marks an Ising gate whose angle depends on the simulated
    time, so :func:`hoist_time_dependence` may move that dependence into a
    z rotation.
    """

    kind: str
    angle: float
    targets: tuple[str, ...]
    variable: bool = False

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        targets = tuple(str(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "angle", float(self.angle))
        if not math.isfinite(self.angle):
            raise ValueError(f"gate angle must be finite, got {self.angle!r}")
        want = 2 if self.kind == "ising_zz" else 1
        if len(targets) != want or len(set(targets)) != want:
            raise ValueError(f"{self.kind} needs {want} distinct target(s), got {targets}")
        if self.variable and self.kind != "ising_zz":
            raise ValueError("only ising_zz gates can be marked variable")

    def inverse(self) -> Gate:
        return replace(self, angle=-self.angle)

    def matrix(self) -> np.ndarray:
        """2x2 or 4x4 unitary on the gate's own targets (first target most significant)."""
        if self.kind == "ising_zz":
            phases = np.exp(-0.5j * self.angle * np.array([1, -1, -1, 1]))
            return np.diag(phases)
        sigma = {"rot_x": X, "rot_y": Y, "rot_z": Z}[self.kind]
        half = 0.5 * self.angle
        return math.cos(half) * np.eye(2) - 1j * math.sin(half) * sigma


def rx(q: str, angle: float) -> Gate:
    return Gate("rot_x", angle, (q,))


def ry(q: str, angle: float) -> Gate:
    return Gate("rot_y", angle, (q,))


def rz(q: str, angle: float) -> Gate:
    return Gate("rot_z", angle, (q,))


def ising(j: str, k: str, angle: float, variable: bool = False) -> Gate:
    return Gate("ising_zz", angle, (j, k), variable)


@dataclass(frozen=True)
class Circuit:
    qubits: tuple[str, ...]
    gates: tuple[Gate, ...] = field(default_factory=tuple)
    ancilla: str | None = None

    def __post_init__(self) -> None:
        qubits = tuple(str(q) for q in self.qubits)
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"duplicate qubit labels in {qubits}")
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            missing = [t for t in gate.targets if t not in qubits]
            if missing:
                raise ValueError(f"gate {gate.kind} targets unknown qubit(s) {missing}")
        if self.ancilla is not None and self.ancilla not in qubits:
            raise ValueError(f"ancilla {self.ancilla!r} is not a circuit qubit")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def index(self, label: str) -> int:
        return self.qubits.index(label)

    def inverse(self) -> Circuit:
        return replace(self, gates=tuple(g.inverse() for g in reversed(self.gates)))

    def then(self, other: Circuit) -> Circuit:
        """``self`` followed by ``other``; qubit order is ``self``'s plus any new labels."""
        qubits = self.qubits + tuple(q for q in other.qubits if q not in self.qubits)
        return Circuit(qubits, self.gates + other.gates, self.ancilla or other.ancilla)

    def on(self, qubits: Sequence[str], ancilla: str | None = None) -> Circuit:
        """Same gates on a (possibly larger, reordered) qubit register."""
        return Circuit(tuple(qubits), self.gates, ancilla if ancilla is not None else self.ancilla)

    def to_dense(self) -> np.ndarray:
        from .simulator import apply_gate

        dim = 2**self.n_qubits
        out = np.eye(dim, dtype=complex)
        for gate in self.gates:
            out = apply_gate(out, gate, self.qubits)
        return out

    def variable_free(self) -> Circuit:
        """Copy with every variable mark cleared."""
        return replace(self, gates=tuple(replace(g, variable=False) for g in self.gates))

    def skeleton(self) -> tuple[tuple[str, float | None, tuple[str, ...]], ...]:
        """Gate list with z-rotation angles blanked, for structural comparison."""
        return tuple((g.kind, None if g.kind == "rot_z" else g.angle, g.targets) for g in self.gates)

    def dumps(self) -> str:
        lines = ["qubits " + " ".join(self.qubits)]
        if self.ancilla is not None:
            lines.append(f"ancilla {self.ancilla}")
        for g in self.gates:
            tail = " @t" if g.variable else ""
            lines.append(f"{g.kind} {g.angle!r} {' '.join(g.targets)}{tail}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> Circuit:
        qubits: tuple[str, ...] | None = None
        ancilla = None
        gates = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, *rest = line.split()
            if head == "qubits":
                qubits = tuple(rest)
            elif head == "ancilla":
                if len(rest) != 1:
                    raise ValueError(f"line {lineno}: ancilla takes one label")
                ancilla = rest[0]
            elif head in GATE_KINDS:
                variable = bool(rest) and rest[-1] == "@t"
                if variable:
                    rest = rest[:-1]
                if len(rest) < 2:
                    raise ValueError(f"line {lineno}: expected angle and targets")
                gates.append(Gate(head, float(rest[0]), tuple(rest[1:]), variable))
            else:
                raise ValueError(f"line {lineno}: unknown directive {head!r}")
        if qubits is None:
            raise ValueError("circuit text has no 'qubits' line")
        return cls(qubits, tuple(gates), ancilla)


def _circuit(gates: Iterable[Gate], qubits: Sequence[str], ancilla: str | None = None) -> Circuit:
    return Circuit(tuple(qubits), tuple(gates), ancilla)


def build_U(theta: float, q1: str = IMPURITY, q2: str = MODE) -> Circuit:
    """Basis change that diagonalizes the two-qubit Hamiltonian.

    Ten gates: x/y quarter turns around a ``-theta``/``+theta`` pair of
    Ising gates.  Its dense matrix ``U`` satisfies
    ``exp(-i Hbar t) = U exp(-i l1 Z1 t) exp(-i l2 Z2 t) U^dagger``.
    """
    gates = [
        ry(q2, -HALF_PI),
        rx(q1, HALF_PI),
        ising(q1, q2, -theta),
        ry(q2, HALF_PI),
        rx(q2, HALF_PI),
        rx(q1, -HALF_PI),
        ry(q1, -HALF_PI),
        ising(q1, q2, theta),
        ry(q1, HALF_PI),
        rx(q2, -HALF_PI),
    ]
    return _circuit(gates, (q1, q2))


def build_evolution(t: float, d: DerivedParams, q1: str = IMPURITY, q2: str = MODE) -> Circuit:
    """``exp(-i Hbar t)`` as ``U^dagger``, two z rotations, then ``U`` (time order)."""
    u = build_U(d.mixing_angle, q1, q2)
    middle = _circuit([rz(q1, 2 * d.rate1 * t), rz(q2, 2 * d.rate2 * t)], (q1, q2))
    return u.inverse().then(middle).then(u)


def build_cnot_a0(control: str = ANCILLA, target: str = IMPURITY) -> Circuit:
    """X on ``target`` when ``control`` is ``|0>``; equals it up to a global phase."""
    gates = [
        rx(target, -HALF_PI),
        ising(target, control, -HALF_PI),
        ry(target, HALF_PI),
        ising(target, control, HALF_PI),
        rz(control, HALF_PI),
    ]
    return _circuit(gates, (control, target), control)


def build_cnot_b1(control: str = ANCILLA, target: str = IMPURITY) -> Circuit:
    """X on ``target`` when ``control`` is ``|1>``; equals it up to a global phase."""
    gates = [
        rx(target, -HALF_PI),
        ising(target, control, HALF_PI),
        ry(target, HALF_PI),
        ising(target, control, -HALF_PI),
        rz(control, -HALF_PI),
    ]
    return _circuit(gates, (control, target), control)


def controlled_x(control_value: int) -> np.ndarray:
    """Dense 4x4 controlled-X with the control as the most significant qubit."""
    proj = [np.diag([1, 0]), np.diag([0, 1])]
    fire = proj[control_value]
    idle = proj[1 - control_value]
    return np.kron(fire, X) + np.kron(idle, np.eye(2))


def build_ancilla_preparation(ancilla: str = ANCILLA) -> Circuit:
    """Takes the ancilla from ``|0>`` to ``|+>`` with a single y quarter turn."""
    return _circuit([ry(ancilla, HALF_PI)], (ancilla,), ancilla)


NETWORK_QUBITS = (ANCILLA, IMPURITY, MODE)


def build_correlation_network(t: float, d: DerivedParams, prepare_ancilla: bool = True) -> Circuit:
    """Ancilla network whose ``<X_a> + i<Y_a>`` is the impurity correlation at ``t``.

    Input is ``|0>_a |1 0>`` on ``(a, 1, 2)``.  The ancilla is put in ``|+>``,
    a ``|1>``-controlled X kicks the impurity, the pair evolves, and a
    ``|0>``-controlled X kicks it again.
    """
    parts = []
    if prepare_ancilla:
        parts.append(build_ancilla_preparation())
    parts += [build_cnot_b1(), build_evolution(t, d), build_cnot_a0()]
    out = Circuit(NETWORK_QUBITS, (), ANCILLA)
    for part in parts:
        out = out.then(part)
    return out


def build_spectrum_network(
    t: float,
    p: ModelParams,
    d: DerivedParams,
    energy_offset: EnergyOffset = "mean",
    prepare_ancilla: bool = True,
) -> Circuit:
    """Ancilla network whose ``<X_a> + i<Y_a>`` is ``<phi|exp(-i H t)|phi>``.

    Implements ``exp(i H Z_a t / 2)`` as ``U^dagger``, two ancilla-controlled
    Ising phases, ``U`` and a final ancilla z rotation carrying the constant
    energy.  The constant commutes with everything, so it is placed last.
    The two Ising gates are marked variable.
    """
    u = build_U(d.mixing_angle)
    coupled = _circuit(
        [
            ising(IMPURITY, ANCILLA, -d.rate1 * t, variable=True),
            ising(MODE, ANCILLA, -d.rate2 * t, variable=True),
        ],
        NETWORK_QUBITS,
        ANCILLA,
    )
    offset = _circuit([rz(ANCILLA, -energy_offset_value(p, energy_offset) * t)], (ANCILLA,))
    out = Circuit(NETWORK_QUBITS, (), ANCILLA)
    if prepare_ancilla:
        out = out.then(build_ancilla_preparation())
    return out.then(u.inverse()).then(coupled).then(u).then(offset)


def hoist_gate(gate: Gate) -> list[Gate]:
    """Fixed-coupling form of a variable Ising gate.

    Conjugating ``Z_k`` by a quarter turn and a fixed ``pi/2`` Ising gate
    maps it to ``Z_j Z_k``, so the coupling angle becomes the angle of a
    z rotation on ``k``.  The two Ising gates no longer depend on the angle.
    """
    if gate.kind != "ising_zz" or not gate.variable:
        raise ValueError("only Ising gates marked variable can be hoisted")
    j, k = gate.targets
    return [
        rx(k, HALF_PI),
        ising(j, k, HALF_PI),
        ry(k, -HALF_PI),
        rz(k, gate.angle),
        ry(k, HALF_PI),
        ising(j, k, -HALF_PI),
        rx(k, -HALF_PI),
    ]


def hoist_time_dependence(c: Circuit) -> Circuit:
    """Replace every variable Ising gate by its fixed-coupling form."""
    gates: list[Gate] = []
    for gate in c.gates:
        gates.extend(hoist_gate(gate) if gate.variable else [gate])
    return replace(c, gates=tuple(gates))
