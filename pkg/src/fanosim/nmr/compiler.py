"""Lowering of gate circuits to pulse sequences for a given molecule.

* x/y rotations become RF pulses whose phase absorbs the spin's frame.
* z rotations become frame advances (virtual z, zero duration).
* Ising gates become refocused delay blocks: the target pair accumulates
  ``integral s_j s_k dt = angle / (pi J)`` while flips on the other spins
  cancel their couplings.

Pulses are treated as instantaneous for free evolution; their nominal
duration only enters the duration budget (and the optional finite-pulse
check in the verifier).  Free precession at each spin's rotating-frame
offset is compensated in software by the frame table, never by pulses.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from scipy.linalg import hadamard, null_space

from ..circuits import Circuit, Gate
from .molecule import Molecule
from .sequence import BlockInfo, Delay, Event, Pulse, PulseSequence, VirtualZ

Refocus = Literal["full", "coarse", "none"]
AXIS_PHASE = {"rot_x": 0.0, "rot_y": math.pi / 2}


class CompileError(ValueError):
    """The circuit cannot be realized on the molecule."""


@dataclass(frozen=True)
class CompileOptions:
    """Knobs of the lowering.

    ``block_duration`` fixes the length of every Ising block (it must be at
    least the needed exposure); ``None`` uses the shortest block.
    ``track_offsets=False`` switches off frame compensation of offset
    precession, which is only useful to show why it is needed.
    """

    pulse_duration: float = 1e-3
    refocus: Refocus = "full"
    block_duration: float | None = None
    carrier_hz: float = 0.0
    track_offsets: bool = True

    def __post_init__(self) -> None:
        if self.pulse_duration <= 0:
            raise ValueError("pulse duration must be positive")
        if self.refocus not in ("full", "coarse", "none"):
            raise ValueError(f"refocus must be 'full', 'coarse' or 'none', got {self.refocus!r}")
        if self.block_duration is not None and self.block_duration < 0:
            raise ValueError("block duration must be non-negative")


def wrap_angle(angle: float) -> float:
    """Representative of ``angle`` in ``[-pi, pi]``."""
    return math.remainder(angle, 2 * math.pi)


def _spin_of(label: str, m: Molecule) -> str:
    try:
        return m.roles[label]
    except KeyError:
        raise CompileError(f"circuit qubit {label!r} is not mapped to a spin of {m.name!r}") from None


def _canonical(durations: Sequence[float], signs: Mapping[str, Sequence[int]]) -> tuple[list[float], dict]:
    """Drop empty segments and merge neighbours with identical sign columns."""
    spins = list(signs)
    out_d: list[float] = []
    out_cols: list[tuple[int, ...]] = []
    for s, d in enumerate(durations):
        if d <= 0:
            continue
        col = tuple(signs[spin][s] for spin in spins)
        if out_cols and out_cols[-1] == col:
            out_d[-1] += d
        else:
            out_d.append(d)
            out_cols.append(col)
    rows = {spin: tuple(col[i] for col in out_cols) for i, spin in enumerate(spins)}
    return out_d, {spin: row for spin, row in rows.items() if any(s < 0 for s in row)}


def _walsh_order(count: int) -> int:
    order = 0
    while 2**order - 1 < count:
        order += 1
    return order


def build_block(
    block_id: int, j: str, k: str, exposure: float, total: float, m: Molecule, refocus: Refocus
) -> BlockInfo:
    """Segment durations and toggling signs for one Ising block.

    The block is split at ``(total + exposure)/2`` where ``k`` is flipped.
    With ``full`` refocusing each half is further split into ``2^r`` equal
    parts and every other coupled spin follows a distinct balanced Walsh
    row in both halves; spectators share one row.
    """
    first = 0.5 * (total + exposure)
    second = 0.5 * (total - exposure)
    others = [s for s in m.labels if s not in (j, k)]
    if refocus == "full":
        active = [s for s in m.active_spins if s not in (j, k)]
        spectators = [
            s
            for s in m.spectator_spins
            if s not in (j, k) and any(m.coupling(s, a) != 0 for a in m.active_spins)
        ]
        rows_needed = len(active) + (1 if spectators else 0)
        n = 2 ** _walsh_order(rows_needed)
        table = hadamard(n)
        durations = [first / n] * n + [second / n] * n
        signs = {k: (1,) * n + (-1,) * n}
        for i, spin in enumerate(active):
            signs[spin] = tuple(table[i + 1]) * 2
        for spin in spectators:
            signs[spin] = tuple(table[len(active) + 1]) * 2
    elif refocus == "coarse":
        cuts = sorted({0.0, first, 0.5 * total, total})
        durations = [b - a for a, b in zip(cuts[:-1], cuts[1:])]
        starts = cuts[:-1]
        signs = {k: tuple(-1 if t >= first else 1 for t in starts)}
        for spin in others:
            signs[spin] = tuple(-1 if t >= 0.5 * total else 1 for t in starts)
    else:
        durations = [first, second]
        signs = {k: (1, -1)}
    durations, signs = _canonical(durations, signs)
    return BlockInfo(block_id, (j, k), exposure, tuple(durations), signs)


def _block_events(block: BlockInfo, pulse_duration: float) -> list[Event]:
    state = {spin: 1 for spin in block.signs}
    out: list[Event] = []

    def flip(spin: str) -> None:
        out.append(Pulse(spin, math.pi, 0.0, 0.0, pulse_duration, block.id))
        state[spin] = -state[spin]

    for s, d in enumerate(block.durations):
        for spin, row in block.signs.items():
            if row[s] != state[spin]:
                flip(spin)
        out.append(Delay(d, block.id))
    for spin in block.signs:
        if state[spin] < 0:
            flip(spin)
    return out


Item = Pulse | VirtualZ | int


def _assemble(items: Iterable[Item], blocks: Mapping[int, BlockInfo], pulse_duration: float) -> list[Event]:
    events: list[Event] = []
    for item in items:
        if isinstance(item, int):
            events.extend(_block_events(blocks[item], pulse_duration))
        else:
            events.append(item)
    return events


def resolve_phases(
    events: Iterable[Event], offsets: Mapping[str, float], spins: Sequence[str], track_offsets: bool = True
) -> tuple[list[Event], dict[str, float], int]:
    """Set gate-pulse phases from the running frame table.

    Invariant: ideal state = ``prod_j R_z(F_j)`` applied to the physical
    state.  A virtual z adds to ``F``; a delay of length ``d`` subtracts
    ``2 pi offset * s * d``, ``s`` being the spin's toggling sign; a gate
    pulse about ideal axis ``base`` is sent at phase ``base - F``.
    Returns the resolved events, final frames and the number of
    frame-table updates performed.
    """
    frames = {s: 0.0 for s in spins}
    sign = {s: 1 for s in spins}
    updates = 0
    out: list[Event] = []
    for e in events:
        if isinstance(e, VirtualZ):
            frames[e.spin] = wrap_angle(frames[e.spin] + e.angle)
            updates += 1
            out.append(e)
        elif isinstance(e, Pulse):
            if e.block is None:
                out.append(replace(e, phase=wrap_angle(e.base_phase - frames[e.spin])))
            else:
                sign[e.spin] = -sign[e.spin]
                out.append(replace(e, phase=e.base_phase))
        else:
            if track_offsets:
                for s in spins:
                    hz = offsets.get(s, 0.0)
                    if hz != 0.0:
                        frames[s] = wrap_angle(frames[s] - 2 * math.pi * hz * sign[s] * e.duration)
                        updates += 1
            out.append(e)
    return out, frames, updates


def coupling_objective(blocks: Iterable[BlockInfo], m: Molecule) -> float:
    """Sum over blocks of ``(2 pi J e)^2`` for every unwanted pair touching a qubit spin."""
    active = set(m.active_spins)
    total = 0.0
    for b in blocks:
        for i, p in enumerate(m.labels):
            for q in m.labels[i + 1 :]:
                jpq = m.coupling(p, q)
                if jpq == 0 or {p, q} == set(b.pair) or not ({p, q} & active):
                    continue
                total += (2 * math.pi * jpq * b.exposure(p, q)) ** 2
    return total


def _items_from_events(events: Iterable[Event]) -> list[Item]:
    items: list[Item] = []
    for e in events:
        if isinstance(e, Delay) and e.block is None:
            raise CompileError("free delays outside Ising blocks are not supported")
        if getattr(e, "block", None) is None:
            items.append(e)
        elif not items or items[-1] != e.block:
            items.append(e.block)
    return items


def _finish(
    items: list[Item],
    blocks: Sequence[BlockInfo],
    m: Molecule,
    opts: CompileOptions,
    name: str,
    offsets: Mapping[str, float] | None = None,
) -> PulseSequence:
    if offsets is None:
        offsets = {s.label: s.shift_hz - opts.carrier_hz for s in m.spins}
    events = _assemble(items, {b.id: b for b in blocks}, opts.pulse_duration)
    events, frames, updates = resolve_phases(events, offsets, m.labels, opts.track_offsets)
    return PulseSequence(
        tuple(events),
        tuple(blocks),
        offsets,
        frames,
        opts.pulse_duration,
        coupling_objective(blocks, m),
        name,
        updates,
    )


def compile_circuit(c: Circuit, m: Molecule, opts: CompileOptions | None = None) -> PulseSequence:
    """Pulse sequence realizing ``c`` on ``m``; see the module docstring for the scheme."""
    opts = opts or CompileOptions()
    for q in c.qubits:
        _spin_of(q, m)
    items: list[Item] = []
    blocks: list[BlockInfo] = []
    for gate in c.gates:
        items.extend(_lower_gate(gate, m, opts, blocks))
    return _finish(items, blocks, m, opts, m.name)


def _lower_gate(gate: Gate, m: Molecule, opts: CompileOptions, blocks: list[BlockInfo]) -> list[Item]:
    spins = [_spin_of(t, m) for t in gate.targets]
    if gate.kind == "rot_z":
        return [VirtualZ(spins[0], gate.angle, "gate")]
    if gate.kind in AXIS_PHASE:
        if gate.angle == 0:
            return []
        base = AXIS_PHASE[gate.kind] + (math.pi if gate.angle < 0 else 0.0)
        return [Pulse(spins[0], abs(gate.angle), base, base, opts.pulse_duration)]
    j, k = spins
    coupling = m.coupling(j, k)
    if coupling == 0:
        raise CompileError(f"spins {j} and {k} are not coupled; Ising gate unreachable")
    exposure = wrap_angle(gate.angle) / (math.pi * coupling)
    total = abs(exposure) if opts.block_duration is None else opts.block_duration
    if total < abs(exposure) * (1 - 1e-12):
        raise CompileError(
            f"block duration {total} s is shorter than the {abs(exposure)} s exposure needed on {j}-{k}"
        )
    block = build_block(len(blocks), j, k, exposure, total, m, opts.refocus)
    blocks.append(block)
    return [block.id]


@dataclass(frozen=True)
class OptimizationResult:
    sequence: PulseSequence
    before: float
    after: float


def _optimize_block(block: BlockInfo, m: Molecule, sweeps: int = 500, tol: float = 1e-15) -> BlockInfo:
    tau = np.array(block.durations, dtype=float)
    if tau.size < 3:
        return block
    j, k = block.pair
    active = set(m.active_spins)
    rows, weights = [], []
    for i, p in enumerate(m.labels):
        for q in m.labels[i + 1 :]:
            jpq = m.coupling(p, q)
            if jpq == 0 or {p, q} == {j, k} or not ({p, q} & active):
                continue
            rows.append(np.array(block.sign_row(p)) * np.array(block.sign_row(q)))
            weights.append((2 * math.pi * jpq) ** 2)
    if not rows:
        return block
    a = np.array(rows, dtype=float)
    q = (a.T * np.array(weights)) @ a
    constraints = np.vstack([np.array(block.sign_row(j)) * np.array(block.sign_row(k)), np.ones(tau.size)])
    basis = null_space(constraints).T

    def objective(x: np.ndarray) -> float:
        return float(x @ q @ x)

    current = objective(tau)
    for _ in range(sweeps):
        start = current
        for n in basis:
            curv = float(n @ q @ n)
            if curv <= 0:
                continue
            step = -float(n @ q @ tau) / curv
            lo, hi = -math.inf, math.inf
            for t_i, n_i in zip(tau, n):
                if n_i > 1e-15:
                    lo = max(lo, -t_i / n_i)
                elif n_i < -1e-15:
                    hi = min(hi, -t_i / n_i)
            step = min(max(step, lo), hi)
            trial = np.maximum(tau + step * n, 0.0)
            value = objective(trial)
            if value < current:
                tau, current = trial, value
        if start - current <= tol * max(start, 1e-300):
            break
    if objective(tau) >= objective(np.array(block.durations)):
        return block
    return replace(block, durations=tuple(tau))


def optimize_delays(seq: PulseSequence, m: Molecule, opts: CompileOptions | None = None) -> OptimizationResult:
    """Redistribute each block's segment durations to reduce unwanted coupling.

    Per block, the segment durations move only inside the null space of the
    target-exposure and total-duration constraints, so every target angle
    and every block length is preserved.  Each move is an exact line
    minimization of the quadratic objective, clipped at zero duration.
    Deterministic, and never increases the objective.
    """
    opts = opts or CompileOptions(pulse_duration=seq.pulse_duration)
    before = coupling_objective(seq.blocks, m)
    blocks = [_optimize_block(b, m) for b in seq.blocks]
    out = _finish(_items_from_events(seq.events), blocks, m, opts, seq.name, seq.offsets)
    return OptimizationResult(out, before, out.residual)
