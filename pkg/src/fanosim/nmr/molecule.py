"""Spin-register descriptions: chemical shifts, J couplings, T2* and qubit roles.

Molecules are stored as JSON::

    {
      "name": "two-spin",
      "spins": [{"label": "A", "shift_hz": 1200.0, "t2star": 0.8}, ...],
      "couplings": [["A", "B", 40.0]],
      "roles": {"1": "A", "2": "B"},
      "spectators": {}
    }

``roles`` maps circuit qubit labels to spins.  Every other spin is a
spectator held in the basis state given by ``spectators`` (default 0).
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

MAX_SPINS = 7


@dataclass(frozen=True)
class Spin:
    label: str
    shift_hz: float
    t2star: float

    def __post_init__(self) -> None:
        if not self.label or any(ch.isspace() for ch in self.label):
            raise ValueError(f"spin label must be a non-empty word, got {self.label!r}")
        if not math.isfinite(self.shift_hz):
            raise ValueError(f"shift of {self.label} must be finite")
        if not self.t2star > 0:
            raise ValueError(f"T2* of {self.label} must be positive, got {self.t2star}")


@dataclass(frozen=True)
class Molecule:
    spins: tuple[Spin, ...]
    couplings: np.ndarray
    roles: Mapping[str, str] = field(default_factory=dict)
    spectators: Mapping[str, int] = field(default_factory=dict)
    name: str = "molecule"

    def __post_init__(self) -> None:
        spins = tuple(self.spins)
        object.__setattr__(self, "spins", spins)
        labels = [s.label for s in spins]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate spin labels in {labels}")
        if not 1 <= len(spins) <= MAX_SPINS:
            raise ValueError(f"molecule must have 1 to {MAX_SPINS} spins, got {len(spins)}")
        shifts = [s.shift_hz for s in spins]
        if len(set(shifts)) != len(shifts):
            raise ValueError("chemical shifts must be distinct")
        j = np.array(self.couplings, dtype=float)
        if j.shape != (len(spins), len(spins)):
            raise ValueError(f"coupling matrix must be {len(spins)}x{len(spins)}, got {j.shape}")
        if not np.allclose(j, j.T, atol=0, rtol=0) or np.any(np.diag(j) != 0):
            raise ValueError("coupling matrix must be symmetric with zero diagonal")
        j.setflags(write=False)
        object.__setattr__(self, "couplings", j)
        roles = {str(k): str(v) for k, v in dict(self.roles).items()}
        for qubit, spin in roles.items():
            if spin not in labels:
                raise ValueError(f"role {qubit!r} refers to unknown spin {spin!r}")
        if len(set(roles.values())) != len(roles):
            raise ValueError("two qubits are mapped to the same spin")
        object.__setattr__(self, "roles", roles)
        spectators = {str(k): int(v) for k, v in dict(self.spectators).items()}
        for spin, value in spectators.items():
            if spin not in labels:
                raise ValueError(f"spectator {spin!r} is not a spin of the molecule")
            if spin in roles.values():
                raise ValueError(f"spin {spin!r} is both a qubit and a spectator")
            if value not in (0, 1):
                raise ValueError(f"spectator state must be 0 or 1, got {value}")
        object.__setattr__(self, "spectators", spectators)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.spins)

    @property
    def n_spins(self) -> int:
        return len(self.spins)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def spin(self, label: str) -> Spin:
        return self.spins[self.index(label)]

    def coupling(self, a: str, b: str) -> float:
        return float(self.couplings[self.index(a), self.index(b)])

    @property
    def active_spins(self) -> tuple[str, ...]:
        """Spins carrying circuit qubits, in molecule order."""
        mapped = set(self.roles.values())
        return tuple(l for l in self.labels if l in mapped)

    @property
    def spectator_spins(self) -> tuple[str, ...]:
        mapped = set(self.roles.values())
        return tuple(l for l in self.labels if l not in mapped)

    def spectator_state(self, label: str) -> int:
        return self.spectators.get(label, 0)

    def with_roles(self, roles: Mapping[str, str], spectators: Mapping[str, int] | None = None) -> Molecule:
        return Molecule(self.spins, self.couplings, roles, {} if spectators is None else spectators, self.name)

    def to_dict(self) -> dict:
        pairs = [
            [a.label, b.label, float(self.couplings[i, k])]
            for i, a in enumerate(self.spins)
            for k, b in enumerate(self.spins)
            if i < k and self.couplings[i, k] != 0
        ]
        return {
            "name": self.name,
            "spins": [{"label": s.label, "shift_hz": s.shift_hz, "t2star": s.t2star} for s in self.spins],
            "couplings": pairs,
            "roles": dict(self.roles),
            "spectators": dict(self.spectators),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> Molecule:
        try:
            spins = tuple(Spin(str(s["label"]), float(s["shift_hz"]), float(s["t2star"])) for s in data["spins"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed spin entry: {exc}") from exc
        labels = [s.label for s in spins]
        j = np.zeros((len(spins), len(spins)))
        for entry in data.get("couplings", []):
            if len(entry) != 3:
                raise ValueError(f"coupling entries are [spin, spin, hz], got {entry!r}")
            a, b, hz = entry
            if a not in labels or b not in labels or a == b:
                raise ValueError(f"coupling {entry!r} names unknown or identical spins")
            j[labels.index(a), labels.index(b)] = j[labels.index(b), labels.index(a)] = float(hz)
        return cls(spins, j, data.get("roles", {}), data.get("spectators", {}), str(data.get("name", "molecule")))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> Molecule:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"molecule file is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def load_molecule(path: str | Path) -> Molecule:
    return Molecule.loads(Path(path).read_text())


FIXTURES = ("two_spin", "three_spin", "seven_spin")


def load_fixture(name: str) -> Molecule:
    """Bundled synthetic molecule: ``two_spin``, ``three_spin`` or ``seven_spin``.

    The values are made up with realistic magnitudes (shifts of a few kHz,
    couplings of 6 to 70 Hz, T2* between 0.3 and 1.5 s); they do not
    describe any real compound.
    """
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    text = resources.files("fanosim.nmr").joinpath("fixtures", f"{name}.json").read_text()
    return Molecule.loads(text)


def coupling_matrix(labels: Sequence[str], pairs: Mapping[tuple[str, str], float]) -> np.ndarray:
    """Symmetric J matrix from a ``{(a, b): hz}`` mapping."""
    j = np.zeros((len(labels), len(labels)))
    for (a, b), hz in pairs.items():
        j[labels.index(a), labels.index(b)] = j[labels.index(b), labels.index(a)] = hz
    return j
