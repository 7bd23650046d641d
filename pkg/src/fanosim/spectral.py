"""Direct DFT of sampled signals, peak extraction and error propagation.

The transform is ``S~(eta) = (1/M) sum_j S(t_j) exp(i eta t_j)`` evaluated
by a plain sum over the actual sample times, so a signal
``exp(-i mu t)`` peaks at ``eta = mu``.  Bins are ``eta_l = 2 pi l / (M dt)``
with ``l`` chosen so that ``eta`` lies in ``(-pi/dt, pi/dt]``.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .simulator import ExperimentResult

SPECTRUM_COLUMNS = ("eta", "re", "im", "std")


@dataclass(frozen=True)
class Spectrum:
    eta: np.ndarray
    amplitudes: np.ndarray
    std: np.ndarray
    M: int
    dt: float

    @property
    def resolution(self) -> float:
        """Bin spacing ``2 pi / (M dt)``."""
        return 2 * math.pi / (self.M * self.dt)

    def rows(self) -> list[tuple[float, float, float, float]]:
        return [(float(e), float(a.real), float(a.imag), float(s)) for e, a, s in zip(self.eta, self.amplitudes, self.std)]


def centered_bins(m: int, dt: float) -> np.ndarray:
    """``2 pi l / (M dt)`` for the ``M`` integers ``l`` with ``eta`` in ``(-pi/dt, pi/dt]``."""
    l = np.arange(m) - (m - 1) // 2
    return 2 * math.pi * l / (m * dt)


def _uniform_step(t: np.ndarray) -> float:
    if t.size < 2:
        raise ValueError("a DFT needs at least two samples")
    steps = np.diff(t)
    dt = float(steps.mean())
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-9 * max(1.0, abs(dt)):
        raise ValueError("sample times must form a uniform increasing grid")
    return dt


def dft(series: ExperimentResult) -> Spectrum:
    """Direct DFT at centered bins, with per-bin standard deviation of the real part.

    With independent Gaussian errors ``std_re``, ``std_im`` on each sample
    the real part of bin ``l`` has variance
    ``sum_j (std_re_j^2 cos^2 phi + std_im_j^2 sin^2 phi) / M^2``,
    ``phi = eta_l t_j``; equal constant errors ``E`` give ``E / sqrt(M)``.
    """
    t = series.t
    dt = _uniform_step(t)
    m = t.size
    eta = centered_bins(m, dt)
    phase = np.outer(eta, t)
    kernel = np.exp(1j * phase)
    amplitudes = kernel @ series.values / m
    var = (np.cos(phase) ** 2) @ (series.std_re**2) + (np.sin(phase) ** 2) @ (series.std_im**2)
    return Spectrum(eta, amplitudes, np.sqrt(var) / m, m, dt)


def dirichlet_leakage(offset: np.ndarray, m: int, dt: float) -> np.ndarray:
    """``|(1/M) sum_j exp(i x t_j)|`` on a uniform grid: the spread of one tone ``x`` away from a bin."""
    x = 0.5 * np.asarray(offset, dtype=float) * dt
    num = np.sin(m * x)
    den = m * np.sin(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(den) < 1e-300, 1.0, np.abs(num / den))
    return out


def propagate_errors(e_s: float, m: int) -> float:
    """Per-bin standard deviation ``E_S / sqrt(M)`` for a constant per-sample error ``E_S``."""
    if e_s < 0:
        raise ValueError("per-sample error must be non-negative")
    if m < 1:
        raise ValueError("sample count must be positive")
    return e_s / math.sqrt(m)


@dataclass(frozen=True)
class Peak:
    frequency: float
    weight: float
    resolution: float
    bin: int


@dataclass(frozen=True)
class PeakReport:
    peaks: tuple[Peak, ...]
    complete: bool

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([p.frequency for p in self.peaks])

    @property
    def weights(self) -> np.ndarray:
        return np.array([p.weight for p in self.peaks])


def find_peaks(spec: Spectrum, count: int = 2, refine: bool = False) -> PeakReport:
    """Largest ``count`` local maxima of the real part, strongest first.

    Neighbours wrap around the frequency axis.  Each peak carries the bin
    spacing as its frequency uncertainty and the raw bin amplitude as its
    weight.  ``refine`` moves the frequency to the vertex of a parabola
    through the magnitudes of the peak bin and its two neighbours (the
    real part carries a phase that biases the fit off-grid).
    ``complete`` is false when fewer than ``count`` maxima exist.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    re = spec.amplitudes.real
    mag = np.abs(spec.amplitudes)
    n = re.size
    if n == 1:
        maxima = [0]
    else:
        left, right = np.roll(re, 1), np.roll(re, -1)
        maxima = [i for i in range(n) if re[i] > left[i] and re[i] >= right[i]]
    maxima.sort(key=lambda i: (-re[i], i))
    chosen = maxima[:count]
    peaks = []
    for i in chosen:
        freq = float(spec.eta[i])
        if refine and n >= 3:
            a, b, c = mag[(i - 1) % n], mag[i], mag[(i + 1) % n]
            denom = a - 2 * b + c
            if denom != 0:
                freq += 0.5 * (a - c) / denom * spec.resolution
        peaks.append(Peak(freq, float(re[i]), spec.resolution, i))
    return PeakReport(tuple(peaks), len(chosen) == count)


def nyquist_violations(frequencies: Iterable[float], dt: float) -> list[float]:
    """Frequencies outside ``(-pi/dt, pi/dt]``, which alias on a ``dt`` grid."""
    limit = math.pi / dt
    return [f for f in frequencies if not -limit < f <= limit]


def check_nyquist(frequencies: Iterable[float], dt: float) -> bool:
    """Warn and return ``False`` if any frequency would alias."""
    bad = nyquist_violations(frequencies, dt)
    if bad:
        warnings.warn(f"frequencies {bad} exceed the Nyquist limit pi/dt = {math.pi / dt:.4g}", stacklevel=2)
    return not bad
