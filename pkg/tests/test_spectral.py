from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fanosim.model import SPECTRUM_SET, one_particle_spectrum, oracle_spectrum_signal
from fanosim.simulator import ExperimentResult, time_grid
from fanosim.spectral import (
    Spectrum,
    centered_bins,
    check_nyquist,
    dft,
    dirichlet_leakage,
    find_peaks,
    nyquist_violations,
    propagate_errors,
)

M, DT = 128, 0.1
GRID = time_grid(DT, DT, M)


def series(values, t=GRID, std=0.0) -> ExperimentResult:
    return ExperimentResult(t, np.asarray(values, dtype=complex), std, std)


def geometric_dft(weights, freqs, eta, t0, dt, m):
    """Closed-form DFT of sum_i w_i exp(-i mu_i t) on t0 + j dt (independent of the summing code)."""
    out = np.zeros(len(eta), dtype=complex)
    for w, mu in zip(weights, freqs):
        x = (np.asarray(eta) - mu) * dt
        r = np.exp(1j * x)
        with np.errstate(divide="ignore", invalid="ignore"):
            geo = np.where(np.abs(1 - r) < 1e-14, m, (1 - r**m) / (1 - r))
        out += w * np.exp(1j * (np.asarray(eta) - mu) * t0) * geo / m
    return out


def test_bins_are_centered_and_uniform():
    eta = centered_bins(M, DT)
    assert eta.size == M
    assert np.allclose(np.diff(eta), 2 * math.pi / (M * DT))
    assert eta[-1] == pytest.approx(math.pi / DT)
    assert eta[0] > -math.pi / DT
    assert np.any(eta == 0)


@pytest.mark.parametrize("m", [1, 2, 5, 16, 33])
def test_bins_cover_half_open_interval(m):
    eta = centered_bins(m, 0.25)
    assert np.all(eta > -math.pi / 0.25 - 1e-12)
    assert np.all(eta <= math.pi / 0.25 + 1e-12)


def test_constant_signal_gives_single_unit_peak():
    spec = dft(series(np.ones(M)))
    zero = int(np.argmin(np.abs(spec.eta)))
    assert spec.amplitudes[zero] == pytest.approx(1.0, abs=1e-12)
    others = np.delete(spec.amplitudes, zero)
    assert np.max(np.abs(others)) < 1e-12


@pytest.mark.parametrize("l", [-63, -20, 0, 5, 64])
def test_on_grid_tone(l):
    mu = 2 * math.pi * l / (M * DT)
    spec = dft(series(np.exp(-1j * mu * GRID)))
    peak = find_peaks(spec, count=1).peaks[0]
    assert peak.frequency == pytest.approx(mu)
    assert peak.weight == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(spec.amplitudes.imag)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=M) + 1j * rng.normal(size=M)
    y = rng.normal(size=M) + 1j * rng.normal(size=M)
    lhs = dft(series(a * x + b * y)).amplitudes
    rhs = a * dft(series(x)).amplitudes + b * dft(series(y)).amplitudes
    assert np.allclose(lhs, rhs, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 64))
def test_parseval(seed, m):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=m) + 1j * rng.normal(size=m)
    spec = dft(series(x, time_grid(0.3, 0.05, m)))
    assert np.sum(np.abs(spec.amplitudes) ** 2) == pytest.approx(np.sum(np.abs(x) ** 2) / m, rel=1e-10)


def test_oracle_spectrum_matches_closed_form_sum():
    values, weights = one_particle_spectrum(SPECTRUM_SET)
    spec = dft(series(oracle_spectrum_signal(SPECTRUM_SET, GRID)))
    expected = geometric_dft(weights, values, spec.eta, DT, DT, M)
    assert np.allclose(spec.amplitudes, expected, atol=1e-10)


def test_noiseless_peaks_and_weights():
    values, weights = one_particle_spectrum(SPECTRUM_SET)
    report = find_peaks(dft(series(oracle_spectrum_signal(SPECTRUM_SET, GRID))))
    assert report.complete
    strong, weak = report.peaks
    assert abs(strong.frequency - values[1]) < strong.resolution
    assert abs(weak.frequency - values[0]) < weak.resolution
    assert strong.weight == pytest.approx(weights[1], abs=0.05)
    assert weak.weight == pytest.approx(weights[0], abs=0.05)


def test_imaginary_part_bounded_by_leakage():
    values, weights = one_particle_spectrum(SPECTRUM_SET)
    spec = dft(series(oracle_spectrum_signal(SPECTRUM_SET, GRID)))
    bound = sum(w * dirichlet_leakage(spec.eta - mu, M, DT) for w, mu in zip(weights, values))
    assert np.all(np.abs(spec.amplitudes.imag) <= bound + 1e-12)


def test_on_grid_mixture_has_zero_imaginary_part():
    freqs = 2 * math.pi * np.array([-40, -10]) / (M * DT)
    signal = 0.3 * np.exp(-1j * freqs[0] * GRID) + 0.7 * np.exp(-1j * freqs[1] * GRID)
    spec = dft(series(signal))
    assert np.max(np.abs(spec.amplitudes.imag)) < 1e-12
    assert np.allclose(sorted(find_peaks(spec).weights), [0.3, 0.7])


def test_dirichlet_kernel_values():
    assert dirichlet_leakage(np.array([0.0]), M, DT)[0] == 1.0
    assert dirichlet_leakage(np.array([2 * math.pi / (M * DT)]), M, DT)[0] == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize(
    "e_s, m, expected",
    [(0.04, 128, 0.00353553390593), (0.04, 32, 0.00707106781187), (0.0, 10, 0.0), (1.0, 1, 1.0)],
)
def test_error_propagation_examples(e_s, m, expected):
    assert propagate_errors(e_s, m) == pytest.approx(expected, abs=1e-12)


def test_error_propagation_two_significant_figures():
    assert f"{propagate_errors(0.04, 128):.2g}" == "0.0035"


def test_error_propagation_rejects_bad_input():
    with pytest.raises(ValueError):
        propagate_errors(-0.1, 4)
    with pytest.raises(ValueError):
        propagate_errors(0.1, 0)


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 1), st.integers(2, 200))
def test_dft_std_matches_propagation(e_s, m):
    spec = dft(series(np.zeros(m), time_grid(0.1, 0.1, m), e_s))
    assert np.allclose(spec.std, propagate_errors(e_s, m), rtol=1e-12, atol=1e-15)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_total_bin_variance_invariant_under_error_permutation(seed):
    # equal re/im errors: each sample contributes std_j^2 / M^2 to every bin
    rng = np.random.default_rng(seed)
    m = 16
    t = time_grid(0.1, 0.1, m)
    errs = rng.uniform(0, 0.1, m)
    shuffled = rng.permutation(errs)
    a = dft(ExperimentResult(t, np.zeros(m), errs, errs))
    b = dft(ExperimentResult(t, np.zeros(m), shuffled, shuffled))
    assert np.sum(a.std**2) == pytest.approx(np.sum(errs**2) / m, rel=1e-10)
    assert np.sum(b.std**2) == pytest.approx(np.sum(a.std**2), rel=1e-10)


def test_noisy_series_std_recorded():
    spec = dft(series(np.zeros(M), std=0.04))
    assert np.allclose(spec.std, 0.0035355339059, atol=1e-12)


def test_non_uniform_grid_rejected():
    t = np.array([0.1, 0.2, 0.35, 0.4])
    with pytest.raises(ValueError):
        dft(series(np.zeros(4), t))
    with pytest.raises(ValueError):
        dft(series(np.zeros(1), np.array([0.1])))


def test_find_peaks_incomplete():
    spec = Spectrum(np.arange(4.0), np.array([0, 1, 0, 0], dtype=complex), np.zeros(4), 4, 1.0)
    report = find_peaks(spec, count=2)
    assert not report.complete
    assert report.frequencies.tolist() == [1.0]


def test_find_peaks_reports_resolution():
    spec = dft(series(oracle_spectrum_signal(SPECTRUM_SET, GRID)))
    report = find_peaks(spec)
    assert all(p.resolution == pytest.approx(2 * math.pi / (M * DT)) for p in report.peaks)
    assert report.peaks[0].resolution == pytest.approx(0.4908738521)


@pytest.mark.parametrize("offset", [10.2, 10.3, -20.4, 7.7])
def test_refinement_moves_toward_true_frequency(offset):
    mu = 2 * math.pi * offset / (M * DT)
    spec = dft(series(np.exp(-1j * mu * GRID)))
    raw = find_peaks(spec, count=1).peaks[0].frequency
    refined = find_peaks(spec, count=1, refine=True).peaks[0].frequency
    assert abs(refined - mu) < abs(raw - mu)


def test_nyquist_check():
    assert nyquist_violations([-8.04, -1.96, 40.0], 0.1) == [40.0]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert check_nyquist([-8.04, -1.96], 0.1)
    with pytest.warns(UserWarning):
        assert not check_nyquist([-40.0], 0.1)


def test_rows_schema():
    spec = dft(series(np.ones(4), time_grid(0.1, 0.1, 4)))
    assert len(spec.rows()) == 4
    assert all(len(r) == 4 for r in spec.rows())
