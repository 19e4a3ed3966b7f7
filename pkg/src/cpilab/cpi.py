"""Chirped-pulse cross-correlator.

Oppositely chirped pulses meet at a beamsplitter; one output passes through
the sample, the other through a variable delay.  The two are up-converted by
an instantaneous field product and the sum-frequency light is band-pass
filtered and integrated per pulse.

The sample arm may be advanced by a ``reference_delay`` (usually the sample's
group delay) provided the delay arm is then shifted by ``tau -
reference_delay``.  That is a common time translation of both arms and leaves
every detected energy unchanged, while keeping the stretched pulses centred
on the periodic grid when the sample delays one arm by hundreds of ps.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .analysis import fit_gaussian_dip
from .errors import WrapAroundError
from .experiment import Interferogram, OpticalSetup, Scan, SpectrumMap
from .grids import SpectralField, TemporalField, from_spectrum, gaussian_spectrum_pulse, to_spectrum
from .optics import (BandpassFilter, attenuate, beamsplitter_combine, chirp_phase, delay_field,
                     group_delay, material_phase, apply_spectral_phase, transform_limit)
from .units import bandwidth_nm_to_omega, delay_to_stage, omega_to_wavelength, stage_to_delay

# the off-dip reference delay, in transform-limited pulse durations
OFF_DIP_FACTOR = 20.0


def stretched_pulse(setup: OpticalSetup, which: str, grids=None) -> TemporalField:
    """Unit-energy chirped ('chirped') or anti-chirped ('antichirped') pulse."""
    grids = setup.grids() if grids is None else grids
    arm = setup.chirped if which == "chirped" else setup.antichirped
    seed = gaussian_spectrum_pulse(grids, arm.spectral_fwhm(setup.laser.centre_nm))
    s = apply_spectral_phase(seed, chirp_phase(seed.grid, arm.chirp))
    if arm.chirp.overlap_offset:
        s = delay_field(s, arm.chirp.overlap_offset)
    return from_spectrum(s)


def acceptance_amplitude(setup: OpticalSetup, omegas) -> np.ndarray:
    """Gaussian phase-matching acceptance seen by the sample-arm input.

    The acceptance FWHM is quoted at the SFG wavelength and centred on the
    tuned degeneracy (half the filter centre frequency).
    """
    if setup.sfg_acceptance_nm is None:
        return np.ones_like(np.asarray(omegas, dtype=float))
    width = bandwidth_nm_to_omega(setup.sfg_acceptance_nm, setup.filter.centre_nm)
    d = np.asarray(omegas, dtype=float) - setup.filter.centre_omega / 2
    return np.exp(-2 * math.log(2) * d**2 / width**2)


def prepare_arms(setup: OpticalSetup, reference_delay: float = 0.0, grids=None):
    """Return (delay-arm field, sample-arm field) leaving the beamsplitter.

    The sample arm carries the material phase, the transmission sqrt(eta)
    and, when configured, the SFG acceptance; it is advanced by
    ``reference_delay``.
    """
    grids = setup.grids() if grids is None else grids
    c = stretched_pulse(setup, "chirped", grids)
    a = stretched_pulse(setup, "antichirped", grids)
    out_delay, out_sample = beamsplitter_combine(c, a)

    s = to_spectrum(out_sample)
    phase = material_phase(setup.sample, s.grid) if setup.sample else np.zeros(s.grid.n_points)
    phase = phase - s.grid.omegas * reference_delay
    s = apply_spectral_phase(s, phase)
    s = s.with_samples(s.samples * acceptance_amplitude(setup, s.grid.omegas))
    s = attenuate(s, setup.sample_transmission)

    return out_delay, from_spectrum(s)


def sfg_field(arm_delay: TemporalField, arm_sample: TemporalField, tau: float,
              guard: float | None = None) -> TemporalField:
    """Up-converted field: delay arm shifted by ``tau`` times the sample arm."""
    shifted = delay_field(arm_delay, tau, guard)
    if shifted.grid != arm_sample.grid:
        raise ValueError("arms live on different grids")
    return TemporalField(arm_sample.grid, shifted.carrier + arm_sample.carrier,
                         shifted.samples * arm_sample.samples)


def detect(sfg: TemporalField, filt: BandpassFilter | None, background: float = 0.0) -> float:
    """Per-pulse energy transmitted by the band-pass filter plus a constant background."""
    s = to_spectrum(sfg)
    if filt is None or math.isinf(filt.fwhm_nm):
        energy = s.energy
    else:
        t = filt.amplitude(s.grid.omegas)
        energy = float(np.sum(s.power * t**2) * s.grid.domega / (2 * np.pi))
    return max(energy, 0.0) + background


def sfg_spectrum(sfg: TemporalField) -> SpectralField:
    return to_spectrum(sfg)


class CPIEngine:
    """Scan driver for one OpticalSetup; arms are built once and reused per delay."""

    def __init__(self, setup: OpticalSetup, reference_delay: float | None = None):
        self.setup = setup
        self.grids = setup.grids()
        if reference_delay is None:
            reference_delay = group_delay(setup.sample, setup.effective_centre) if setup.sample else 0.0
        self.reference_delay = reference_delay
        self.arm_delay, self.arm_sample = prepare_arms(setup, reference_delay, self.grids)
        self.guard = self.grids[0].guard_band(setup.longest_duration)
        self.background = setup.detector.background
        if setup.detector.background_fraction:
            self.background += setup.detector.background_fraction * self.off_dip_level()

    def off_dip_level(self) -> float:
        """Filtered SFG energy well outside the dip (no background)."""
        tau = self.reference_delay + min(OFF_DIP_FACTOR * transform_limit(self.setup.widest_spectrum),
                                         self.guard)
        return detect(self.sfg(tau), self.setup.filter)

    def _relative(self, tau: float) -> float:
        rel = tau - self.reference_delay
        if abs(rel) > self.guard:
            raise WrapAroundError(
                f"delay {tau:.6g} fs is {rel:.6g} fs from the arm overlap; guard band is {self.guard:.6g} fs")
        return rel

    def sfg(self, tau: float) -> TemporalField:
        return sfg_field(self.arm_delay, self.arm_sample, self._relative(tau), guard=math.inf)

    def signal(self, tau: float) -> float:
        return detect(self.sfg(tau), self.setup.filter, self.background)

    def _map(self, fn, taus, threads: int = 1) -> list:
        taus = [float(t) for t in taus]
        for t in taus:
            self._relative(t)
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                return list(pool.map(fn, taus))
        return [fn(t) for t in taus]

    def interferogram(self, scan: Scan, threads: int = 1) -> Interferogram:
        x = scan.positions
        sig = self._map(self.signal, stage_to_delay(x), threads)
        return Interferogram.from_positions(x, sig, "cpi-dip")

    def spectrum_map(self, scan: Scan, window_nm: float = 3.0, threads: int = 1) -> SpectrumMap:
        """Raw SFG spectra (no band-pass) within +/- window_nm of the filter centre."""
        x = scan.positions
        fg_omegas = to_spectrum(self.sfg(stage_to_delay(x[0]))).grid.omegas
        lam = omega_to_wavelength(fg_omegas)
        keep = np.abs(lam - self.setup.filter.centre_nm) <= window_nm
        order = np.argsort(lam[keep])

        def row(tau):
            return to_spectrum(self.sfg(tau)).power[keep][order]

        rows = self._map(row, stage_to_delay(x), threads)
        return SpectrumMap(x, lam[keep][order], np.array(rows))


def cpi_interferogram(setup: OpticalSetup, scan: Scan, threads: int = 1) -> Interferogram:
    return CPIEngine(setup).interferogram(scan, threads)


def sfg_spectrum_map(setup: OpticalSetup, scan: Scan, window_nm: float = 3.0, threads: int = 1) -> SpectrumMap:
    return CPIEngine(setup).spectrum_map(scan, window_nm, threads)


def loss_sweep(setup: OpticalSetup, scan: Scan, etas, threads: int = 1) -> list[tuple[float, float]]:
    """Fitted CPI dip visibility for each sample-arm transmission in ``etas``."""
    out = []
    for eta in etas:
        trace = cpi_interferogram(setup.replace(sample_transmission=float(eta)), scan, threads)
        out.append((float(eta), fit_gaussian_dip(trace).visibility))
    return out


def expected_dip_position(setup: OpticalSetup) -> float:
    """Stage position (um) where the delay arm matches the sample group delay."""
    if not setup.sample:
        return 0.0
    return delay_to_stage(group_delay(setup.sample, setup.effective_centre))
