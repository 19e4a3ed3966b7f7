import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpilab.analysis import measure_fwhm
from cpilab.errors import GridError
from cpilab.grids import (SpectralField, TemporalField, from_spectrum, gaussian_pulse, make_grids,
                          to_spectrum)
from cpilab.units import bandwidth_omega_to_nm, wavelength_to_omega

W0 = wavelength_to_omega(790.0)


def test_make_grids_example():
    tg, fg = make_grids(400000.0, 2**15, 2.385)
    assert tg.dt == pytest.approx(12.207, abs=1e-3)
    assert fg.domega == pytest.approx(1.5708e-5, rel=1e-4)
    assert tg.span == 400000.0
    assert fg.domega * tg.dt * tg.n_points == pytest.approx(2 * math.pi, rel=1e-14)


def test_carrier_790():
    assert W0 == pytest.approx(2.3845, abs=2e-4)


@pytest.mark.parametrize("n, span", [(1000, 1e4), (2**10, 0.0), (2**10, -5.0), (3, 1.0)])
def test_make_grids_errors(n, span):
    with pytest.raises(GridError):
        make_grids(span, n, W0)


def test_gaussian_pulse_energy_and_centre():
    grids = make_grids(20000.0, 2**12, W0)
    p = gaussian_pulse(grids, 110.0, energy=3.5)
    assert p.energy == pytest.approx(3.5, rel=1e-12)
    assert p.grid.times[np.argmax(p.intensity)] == pytest.approx(0.0, abs=p.grid.dt)
    assert not np.any(gaussian_pulse(grids, 110.0, energy=0.0).samples)


@pytest.mark.parametrize("fwhm", [50.0, 80.0, 110.0, 150.0, 200.0])
def test_gaussian_pulse_fwhm_within_one_cell(fwhm):
    grids = make_grids(400000.0 / 16, 2**15, W0)
    p = gaussian_pulse(grids, fwhm)
    assert abs(measure_fwhm(p.grid.times, p.intensity) - fwhm) <= p.grid.dt


def test_gaussian_pulse_unresolvable():
    with pytest.raises(GridError):
        gaussian_pulse(make_grids(1e5, 2**10, W0), 110.0)


def test_transform_limited_spectrum_width():
    grids = make_grids(50000.0, 2**14, W0)
    s = to_spectrum(gaussian_pulse(grids, 110.0))
    dw = measure_fwhm(s.grid.detunings, s.power)
    assert dw / (2 * math.pi) * 1000 == pytest.approx(4.01, abs=0.01)   # THz
    assert bandwidth_omega_to_nm(dw, 790.0) == pytest.approx(8.3, abs=0.1)


def test_impulse_has_flat_spectrum():
    tg, _ = make_grids(1000.0, 256, W0)
    x = np.zeros(256, complex)
    x[100] = 1.0
    s = to_spectrum(TemporalField(tg, W0, x))
    assert np.ptp(np.abs(s.samples)) < 1e-12


def test_spectrum_peak_of_delayed_pulse_phase_slope():
    # a pulse centred at t0 has spectral phase slope +t0 in this convention
    grids = make_grids(20000.0, 2**12, W0)
    tg = grids[0]
    t0 = 500.0
    env = np.exp(-2 * np.log(2) * (tg.times - t0) ** 2 / 200.0**2)
    s = to_spectrum(TemporalField(tg, W0, env))
    ph = np.unwrap(np.angle(s.samples))
    mid = slice(tg.n_points // 2 - 5, tg.n_points // 2 + 5)
    slope = np.polyfit(s.grid.detunings[mid], ph[mid], 1)[0]
    assert slope == pytest.approx(t0, rel=1e-6)


def test_grid_mismatch_rejected():
    tg, fg = make_grids(1000.0, 256, W0)
    tg2, _ = make_grids(2000.0, 256, W0)
    with pytest.raises(GridError):
        SpectralField(fg, np.zeros(256, complex), tg2)
    with pytest.raises(GridError):
        TemporalField(tg, W0, np.zeros(128, complex))


def test_fields_are_read_only():
    tg, _ = make_grids(1000.0, 256, W0)
    f = TemporalField(tg, W0, np.ones(256, complex))
    with pytest.raises(ValueError):
        f.samples[0] = 2.0


complex_arrays = st.integers(min_value=0, max_value=2**32 - 1).map(
    lambda seed: (lambda r: r.standard_normal(512) + 1j * r.standard_normal(512))(np.random.default_rng(seed)))


@settings(max_examples=30, deadline=None)
@given(complex_arrays, st.floats(min_value=100.0, max_value=1e6))
def test_round_trip_and_parseval(x, span):
    tg, _ = make_grids(span, 512, W0)
    f = TemporalField(tg, W0, x)
    s = to_spectrum(f)
    back = from_spectrum(s)
    assert np.max(np.abs(back.samples - x)) <= 1e-12 * np.max(np.abs(x))
    assert s.energy == pytest.approx(f.energy, rel=1e-10)
    assert back.carrier == W0
