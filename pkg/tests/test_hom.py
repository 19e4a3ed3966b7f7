import math
import time

import numpy as np
import pytest

from cpilab.analysis import fit_gaussian_dip, measure_fwhm
from cpilab.experiment import Scan, lab_setup
from cpilab.hom import (BiphotonSpectrum, coincidence_rate, gaussian_biphoton, hom_dip, phase_difference, phases,
                        product_spectrum, taylor_sample)
from cpilab.optics import SampleStack, group_delay, load_materials
from cpilab.units import delay_to_stage, wavelength_to_omega

W0 = wavelength_to_omega(790.0)
FWHM = 0.03   # rad/fs


@pytest.fixture(scope="module")
def spectrum():
    return gaussian_biphoton(FWHM)


def test_phases_at_zero_detuning():
    rr, tt = phases(np.array([0.0]), taylor_sample(3.0, 40.0, 2.0, W0), 55.0, W0)
    assert rr[0] == 0.0 and tt[0] == 0.0


def test_beta_only_difference_is_pure_delay():
    d = np.linspace(-0.05, 0.05, 101)
    tau = 37.0
    diff = phase_difference(d, taylor_sample(0.0, 250.0, 3.0, W0), tau, W0)
    assert np.array_equal(diff, -2 * d * tau)


def test_alpha_only_difference_vanishes_at_alpha_L():
    d = np.linspace(-0.05, 0.05, 101)
    diff = phase_difference(d, taylor_sample(12.0, 0.0, 2.5, W0), 30.0, W0)
    assert np.max(np.abs(diff)) < 1e-12
    rr, tt = phases(d, taylor_sample(12.0, 0.0, 2.5, W0), 30.0, W0)
    assert np.allclose(rr - tt, diff, atol=1e-12)


def test_dip_zero_at_alpha_L(spectrum):
    s = taylor_sample(12.0, 0.0, 2.5, W0)
    assert coincidence_rate(spectrum, s, 30.0, W0) < 1e-12
    # +/-4 sigma truncation of the weights leaves a ~1e-6 ripple on the baseline
    assert coincidence_rate(spectrum, s, 30.0 + 5000.0, W0) == pytest.approx(1.0, abs=1e-5)


def test_gaussian_dip_width(spectrum):
    sigma = FWHM / (2 * math.sqrt(2 * math.log(2)))
    expected = 2 * math.sqrt(2 * math.log(2)) / (2 * sigma)
    taus = np.linspace(-300, 300, 6001)
    c = coincidence_rate(spectrum, taylor_sample(), taus, W0)
    assert measure_fwhm(taus, 1 - c) == pytest.approx(expected, rel=1e-4)


def test_even_orders_drop_out(spectrum):
    taus = np.linspace(-200, 260, 47)
    ref = coincidence_rate(spectrum, taylor_sample(15.0, 0.0, 2.0, W0), taus, W0)
    for beta, quartic in ((1e3, 0.0), (-5e4, 0.0), (300.0, 1e6), (0.0, -3e7)):
        s = taylor_sample(15.0, beta, 2.0, W0, higher=(0.0, quartic))
        c = coincidence_rate(spectrum, s, taus, W0)
        assert np.max(np.abs(c - ref)) < 1e-12


def test_dip_symmetric_and_unit_visibility(spectrum):
    s = taylor_sample(10.0, 400.0, 1.0, W0)
    centre = delay_to_stage(10.0)
    tr = hom_dip(spectrum, s, Scan.centred(centre, 40.0, 0.5), W0)
    assert np.allclose(tr.signal, tr.signal[::-1], atol=1e-12)
    assert tr.signal.min() < 1e-12
    fit = fit_gaussian_dip(tr)
    assert fit.visibility == pytest.approx(1.0, abs=2e-3)


def test_quadrature_convergence(spectrum):
    sigma = FWHM / (2 * math.sqrt(2 * math.log(2)))
    fine = spectrum.refined(2, lambda d: np.exp(-d**2 / (2 * sigma**2)))
    taus = np.linspace(-150, 150, 31)
    s = taylor_sample(5.0, 0.0, 1.0, W0, higher=(200.0,))
    a = coincidence_rate(spectrum, s, taus, W0)
    b = coincidence_rate(fine, s, taus, W0)
    # C is normalised to a unit baseline; the change is measured against it
    assert np.max(np.abs(a - b)) < 1e-9


def test_sellmeier_centre_at_group_delay():
    mats = load_materials()
    stack = SampleStack(((mats["bk7"], 5.0),))
    spec = gaussian_biphoton(0.03)
    centre = delay_to_stage(group_delay(stack, W0))
    step = 0.5
    tr = hom_dip(spec, stack, Scan.centred(round(centre), 40.0, step), W0)
    assert abs(tr.stage_positions[np.argmin(tr.signal)] - centre) <= step


def test_spectrum_validation():
    with pytest.raises(ValueError):
        BiphotonSpectrum(np.array([-1.0, 0.0, 2.0]), np.ones(3))
    with pytest.raises(ValueError):
        BiphotonSpectrum(np.array([-1.0, 0.0, 1.0]), np.array([1.0, -1.0, 1.0]))
    with pytest.raises(ValueError):
        BiphotonSpectrum(np.array([-1.0, 0.0, 1.0]), np.zeros(3))


def test_product_spectrum_grid():
    setup = lab_setup()
    p = product_spectrum(setup)
    assert len(p.detunings) == 4097
    assert np.all(p.weights >= 0)
    # grid spans +/-4 sigma of the weight (plus any centroid offset)
    assert p.detunings[-1] >= 4 * p.sigma
    assert p.weights[0] / p.weights.max() < 1e-3


def test_scalar_and_array_agree(spectrum):
    s = taylor_sample(3.0, 10.0, 1.0, W0)
    arr = coincidence_rate(spectrum, s, np.array([10.0, 20.0]), W0)
    assert coincidence_rate(spectrum, s, 20.0, W0) == arr[1]


def test_single_dip_under_one_second(spectrum):
    t = time.perf_counter()
    hom_dip(spectrum, taylor_sample(10.0, 100.0, 1.0, W0), Scan.centred(0.0, 60.0, 0.25), W0)
    assert time.perf_counter() - t < 1.0
