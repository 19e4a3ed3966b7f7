"""White-light (first-order) interferometer fed by the chirped pulse."""

from __future__ import annotations

import numpy as np

from .errors import WrapAroundError
from .experiment import Interferogram, OpticalSetup, Scan
from .grids import to_spectrum
from .optics import apply_spectral_phase, attenuate, group_delay, material_phase
from .cpi import stretched_pulse
from .units import stage_to_delay

CHUNK = 256


class WLIEngine:
    """Two-beam interference of the chirped pulse, directly detected.

    The detected per-pulse energy is evaluated in the spectral domain by
    Parseval, |S1 exp(i w tau) + S2|^2 summed over frequency, which is exact
    for the periodic grid and avoids one FFT per delay.
    """

    def __init__(self, setup: OpticalSetup, reference_delay: float | None = None,
                 which: str = "chirped"):
        self.setup = setup
        grids = setup.grids()
        if reference_delay is None:
            reference_delay = group_delay(setup.sample, setup.omega0) if setup.sample else 0.0
        self.reference_delay = reference_delay
        self.guard = grids[0].guard_band(setup.longest_duration)

        pulse = to_spectrum(stretched_pulse(setup, which, grids))
        half = pulse.with_samples(pulse.samples / np.sqrt(2))
        phase = material_phase(setup.sample, half.grid) if setup.sample else 0.0
        arm2 = apply_spectral_phase(half, phase - half.grid.omegas * reference_delay)
        arm2 = attenuate(arm2, setup.sample_transmission)

        self.norm = half.energy + arm2.energy
        cross = np.conj(half.samples) * arm2.samples
        keep = np.abs(cross) > 1e-18 * np.abs(cross).max()
        self._cross = cross[keep] * half.grid.domega / (2 * np.pi)
        self._omegas = half.grid.omegas[keep]

    def signal(self, taus) -> np.ndarray:
        """Normalised intensity; the baseline away from zero delay is 1."""
        taus = np.atleast_1d(np.asarray(taus, dtype=float)) - self.reference_delay
        if np.any(np.abs(taus) > self.guard):
            raise WrapAroundError(f"WLI delay outside guard band {self.guard:.6g} fs")
        out = np.empty(len(taus))
        for i in range(0, len(taus), CHUNK):
            t = taus[i:i + CHUNK]
            # delaying arm 1 multiplies its spectrum by exp(i w tau)
            ph = np.exp(-1j * np.outer(t, self._omegas))
            out[i:i + CHUNK] = 1.0 + 2.0 * np.real(ph @ self._cross) / self.norm
        return out

    def interferogram(self, scan: Scan) -> Interferogram:
        x = scan.positions
        return Interferogram.from_positions(x, self.signal(stage_to_delay(x)), "wli-fringes")


def wli_interferogram(setup: OpticalSetup, scan: Scan) -> Interferogram:
    return WLIEngine(setup).interferogram(scan)
