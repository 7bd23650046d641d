"""Timed pulse sequences and their line-oriented text format.

A sequence is an ordered list of events:

* ``Pulse``: RF rotation by ``angle`` about the axis at ``phase`` in the
  x-y plane.  Gate pulses (``block is None``) have their phase set from
  the ideal axis ``base_phase`` minus the spin's frame.  Refocusing flips
  belong to an Ising block and keep ``phase = base_phase``.
* ``Delay``: free evolution under offsets and couplings.
* ``VirtualZ``: zero-duration frame advance.

Text format, one record per line (``#`` starts a comment)::

    sequence <name> pulse_duration <seconds>
    offset <spin> <hz>
    block <id> <spin_j> <spin_k> <target_exposure> durations <d...> signs <spin>:<+-...> ...
    pulse <t> <spin> <angle> <phase> <base_phase> <duration> <block|->
    delay <t> <duration> <block|->
    vz <t> <spin> <angle> <source>
    frame <spin> <angle>
    residual <value>

``<t>`` is the start time and is informational; loading recomputes it.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Pulse:
    spin: str
    angle: float
    phase: float
    base_phase: float
    duration: float
    block: int | None = None

    def __post_init__(self) -> None:
        if self.duration < 0:
            raise ValueError("pulse duration must be non-negative")

    @property
    def amplitude(self) -> float:
        """RF amplitude giving ``angle = 2 * amplitude * duration``."""
        return math.inf if self.duration == 0 else self.angle / (2 * self.duration)


@dataclass(frozen=True)
class Delay:
    duration: float
    block: int | None = None

    def __post_init__(self) -> None:
        if self.duration < 0:
            raise ValueError("delay duration must be non-negative")


@dataclass(frozen=True)
class VirtualZ:
    spin: str
    angle: float
    source: str = "gate"


Event = Union[Pulse, Delay, VirtualZ]


@dataclass(frozen=True)
class BlockInfo:
    """One Ising gate realized by delays and refocusing flips.

    ``durations`` are the delay segments in order and ``signs[spin][s]`` is
    that spin's toggling sign during segment ``s``: ``-1`` while an odd
    number of flips has been applied.  Spins absent from ``signs`` are never
    flipped.
    """

    id: int
    pair: tuple[str, str]
    target_exposure: float
    durations: tuple[float, ...]
    signs: Mapping[str, tuple[int, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "durations", tuple(float(d) for d in self.durations))
        object.__setattr__(self, "signs", {k: tuple(int(s) for s in v) for k, v in dict(self.signs).items()})
        if any(d < 0 for d in self.durations):
            raise ValueError("block segment durations must be non-negative")
        for spin, row in self.signs.items():
            if len(row) != len(self.durations) or any(s not in (1, -1) for s in row):
                raise ValueError(f"sign row for {spin} must have one +-1 per segment")

    @property
    def duration(self) -> float:
        return sum(self.durations)

    def sign_row(self, spin: str) -> tuple[int, ...]:
        return self.signs.get(spin, (1,) * len(self.durations))

    def exposure(self, a: str, b: str) -> float:
        """``integral s_a s_b dt`` over the block."""
        return sum(x * y * d for x, y, d in zip(self.sign_row(a), self.sign_row(b), self.durations))

    def net_time(self, spin: str) -> float:
        """``integral s dt``: net offset precession time of ``spin``."""
        return sum(s * d for s, d in zip(self.sign_row(spin), self.durations))


@dataclass(frozen=True)
class PulseSequence:
    events: tuple[Event, ...] = ()
    blocks: tuple[BlockInfo, ...] = ()
    offsets: Mapping[str, float] = field(default_factory=dict)
    frames: Mapping[str, float] = field(default_factory=dict)
    pulse_duration: float = 1e-3
    residual: float = 0.0
    name: str = "sequence"
    frame_updates: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "offsets", dict(self.offsets))
        object.__setattr__(self, "frames", dict(self.frames))

    @property
    def duration(self) -> float:
        return sum(e.duration for e in self.events if isinstance(e, (Pulse, Delay)))

    @property
    def pulses(self) -> tuple[Pulse, ...]:
        return tuple(e for e in self.events if isinstance(e, Pulse))

    def block(self, block_id: int) -> BlockInfo:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise KeyError(block_id)

    def physical_signature(self) -> tuple:
        """Everything about the sequence except phases and frame angles."""
        out = []
        for e in self.events:
            if isinstance(e, Pulse):
                out.append(("pulse", e.spin, e.angle, e.duration, e.block))
            elif isinstance(e, Delay):
                out.append(("delay", e.duration, e.block))
            else:
                out.append(("vz", e.spin))
        return tuple(out)

    def dumps(self) -> str:
        lines = [f"sequence {self.name.replace(' ', '_')} pulse_duration {self.pulse_duration!r}"]
        lines += [f"offset {spin} {hz!r}" for spin, hz in self.offsets.items()]
        for b in self.blocks:
            signs = " ".join(f"{spin}:{''.join('+' if s > 0 else '-' for s in row)}" for spin, row in b.signs.items())
            durations = " ".join(repr(d) for d in b.durations)
            lines.append(
                f"block {b.id} {b.pair[0]} {b.pair[1]} {b.target_exposure!r} durations {durations} signs {signs}".rstrip()
            )
        t = 0.0
        for e in self.events:
            if isinstance(e, Pulse):
                blk = "-" if e.block is None else str(e.block)
                lines.append(f"pulse {t!r} {e.spin} {e.angle!r} {e.phase!r} {e.base_phase!r} {e.duration!r} {blk}")
                t += e.duration
            elif isinstance(e, Delay):
                blk = "-" if e.block is None else str(e.block)
                lines.append(f"delay {t!r} {e.duration!r} {blk}")
                t += e.duration
            else:
                lines.append(f"vz {t!r} {e.spin} {e.angle!r} {e.source}")
        lines += [f"frame {spin} {angle!r}" for spin, angle in self.frames.items()]
        lines.append(f"residual {self.residual!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> PulseSequence:
        name, pulse_duration, residual = "sequence", 1e-3, 0.0
        offsets: dict[str, float] = {}
        frames: dict[str, float] = {}
        blocks: list[BlockInfo] = []
        events: list[Event] = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, *rest = line.split()
            try:
                if head == "sequence":
                    name, pulse_duration = rest[0], float(rest[2])
                elif head == "offset":
                    offsets[rest[0]] = float(rest[1])
                elif head == "block":
                    blocks.append(_parse_block(rest))
                elif head == "pulse":
                    _, spin, angle, phase, base, dur, blk = rest
                    events.append(Pulse(spin, float(angle), float(phase), float(base), float(dur), _block_id(blk)))
                elif head == "delay":
                    _, dur, blk = rest
                    events.append(Delay(float(dur), _block_id(blk)))
                elif head == "vz":
                    _, spin, angle, source = rest
                    events.append(VirtualZ(spin, float(angle), source))
                elif head == "frame":
                    frames[rest[0]] = float(rest[1])
                elif head == "residual":
                    residual = float(rest[0])
                else:
                    raise ValueError(f"unknown record {head!r}")
            except (IndexError, ValueError) as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
        return cls(tuple(events), tuple(blocks), offsets, frames, pulse_duration, residual, name)


def _block_id(token: str) -> int | None:
    return None if token == "-" else int(token)


def _parse_block(tokens: Sequence[str]) -> BlockInfo:
    block_id, j, k, exposure = int(tokens[0]), tokens[1], tokens[2], float(tokens[3])
    if tokens[4] != "durations":
        raise ValueError("block record needs 'durations'")
    split = tokens.index("signs")
    durations = tuple(float(x) for x in tokens[5:split])
    signs = {}
    for item in tokens[split + 1 :]:
        spin, row = item.split(":")
        signs[spin] = tuple(1 if ch == "+" else -1 for ch in row)
    return BlockInfo(block_id, (j, k), exposure, durations, signs)
