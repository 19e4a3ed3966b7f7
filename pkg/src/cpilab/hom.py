"""Direct quadrature of the two-photon coincidence integral

    C(tau) = int dW |f(W)|^2 {1 - cos[phi_rr(W) - phi_tt(W)]}

normalised so the baseline far from the dip is 1.  Only the odd part of the
sample phase about the pair centre enters, so even dispersion orders drop out
identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .cpi import acceptance_amplitude
from .experiment import Interferogram, OpticalSetup, Scan
from .optics import MaterialSpec, SampleStack, Taylor
from .units import stage_to_delay

DEFAULT_POINTS = 4097
DEFAULT_SPAN_SIGMAS = 4.0


@dataclass(frozen=True)
class BiphotonSpectrum:
    detunings: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.detunings, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if d.shape != w.shape or d.ndim != 1:
            raise ValueError("detunings and weights must be 1-D arrays of equal length")
        if not np.allclose(d, -d[::-1], rtol=0, atol=1e-12 * max(np.abs(d).max(), 1e-300)):
            raise ValueError("detuning grid must be symmetric about zero")
        if np.any(w < 0) or not w.sum() > 0:
            raise ValueError("weights must be non-negative and not all zero")
        object.__setattr__(self, "detunings", d)
        object.__setattr__(self, "weights", w)

    @property
    def sigma(self) -> float:
        """RMS width of the weight function (rad/fs)."""
        w = self.weights / trapezoid(self.weights, self.detunings)
        mean = trapezoid(w * self.detunings, self.detunings)
        return float(math.sqrt(trapezoid(w * (self.detunings - mean) ** 2, self.detunings)))

    def refined(self, factor: int = 2, weight_fn=None) -> "BiphotonSpectrum":
        n = (len(self.detunings) - 1) * factor + 1
        d = np.linspace(self.detunings[0], self.detunings[-1], n)
        w = weight_fn(d) if weight_fn is not None else np.interp(d, self.detunings, self.weights)
        return BiphotonSpectrum(d, w)


def spectrum_from_function(weight_fn, sigma: float, n_points: int = DEFAULT_POINTS,
                           span_sigmas: float = DEFAULT_SPAN_SIGMAS) -> BiphotonSpectrum:
    d = np.linspace(-span_sigmas * sigma, span_sigmas * sigma, n_points)
    return BiphotonSpectrum(d, weight_fn(d))


def gaussian_biphoton(fwhm: float, n_points: int = DEFAULT_POINTS,
                      span_sigmas: float = DEFAULT_SPAN_SIGMAS) -> BiphotonSpectrum:
    """|f(W)|^2 Gaussian with intensity FWHM ``fwhm`` (rad/fs)."""
    sigma = fwhm / (2 * math.sqrt(2 * math.log(2)))
    return spectrum_from_function(lambda d: np.exp(-d**2 / (2 * sigma**2)), sigma, n_points, span_sigmas)


def taylor_sample(alpha: float = 0.0, beta: float = 0.0, length_mm: float = 1.0,
                  reference_omega: float = 1.0, higher=()) -> SampleStack:
    m = MaterialSpec("taylor", Taylor(alpha, beta, reference_omega, tuple(higher)))
    return SampleStack(((m, length_mm),))


def phases(detunings, sample: SampleStack, tau: float, omega0: float):
    """(phi_rr, phi_tt) with the global phase phi(omega0) removed."""
    d = np.asarray(detunings, dtype=float)
    p0 = sample.phase(np.array([omega0]))[0]
    phi_rr = sample.phase(omega0 + d) - p0 - d * tau
    phi_tt = sample.phase(omega0 - d) - p0 + d * tau
    return phi_rr, phi_tt


def phase_difference(detunings, sample: SampleStack, tau, omega0: float):
    """phi_rr - phi_tt from the exact odd part of the sample phase.

    ``tau`` may be an array; the result then has shape (len(tau), len(detunings)).
    """
    d = np.asarray(detunings, dtype=float)
    odd = sample.odd_phase(omega0, d)
    tau = np.asarray(tau, dtype=float)
    return odd - 2 * np.multiply.outer(tau, d)


def coincidence_rate(spectrum: BiphotonSpectrum, sample: SampleStack, tau, omega0: float):
    """Normalised coincidence rate (baseline 1) at one delay or an array of delays."""
    d, w = spectrum.detunings, spectrum.weights
    diff = phase_difference(d, sample, tau, omega0)
    norm = trapezoid(w, d)
    c = trapezoid(w * (1 - np.cos(diff)), d, axis=-1) / norm
    return np.maximum(c, 0.0) if np.ndim(c) else max(float(c), 0.0)


def hom_dip(spectrum: BiphotonSpectrum, sample: SampleStack, scan: Scan, omega0: float,
            chunk: int = 256) -> Interferogram:
    x = scan.positions
    taus = stage_to_delay(x)
    c = np.concatenate([coincidence_rate(spectrum, sample, taus[i:i + chunk], omega0)
                        for i in range(0, len(taus), chunk)])
    return Interferogram.from_positions(x, c, "hom-dip")


def product_spectrum(setup: OpticalSetup, n_points: int = DEFAULT_POINTS,
                     span_sigmas: float = DEFAULT_SPAN_SIGMAS) -> BiphotonSpectrum:
    """Two-frequency weight S_c(we + W) S_a(we - W) of the chirped-pulse setup.

    ``we`` is the effective pair centre set by the overlap offset; a
    configured SFG acceptance multiplies in as seen by the sample-arm input.
    """
    lam = setup.laser.centre_nm
    w0, we = setup.omega0, setup.effective_centre
    fc = setup.chirped.spectral_fwhm(lam)
    fa = setup.antichirped.spectral_fwhm(lam)

    def spec(fwhm, det):
        return np.exp(-4 * math.log(2) * det**2 / fwhm**2)

    def weight(d):
        w = spec(fc, we + d - w0) * spec(fa, we - d - w0)
        return w * acceptance_amplitude(setup, we + d) * acceptance_amplitude(setup, we - d)

    probe = spectrum_from_function(weight, max(fc, fa), 8193, 8.0)
    w = probe.weights / trapezoid(probe.weights, probe.detunings)
    mean = abs(trapezoid(w * probe.detunings, probe.detunings))
    return spectrum_from_function(weight, probe.sigma + mean / span_sigmas, n_points, span_sigmas)
