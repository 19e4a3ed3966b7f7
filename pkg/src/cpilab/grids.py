"""Uniform time/frequency grids and complex analytic-envelope field containers.

Fields are stored as slowly varying envelopes about a tracked carrier, with
the full field ``E(t) = envelope(t) * exp(-i * carrier * t)``.  Spectra use the
matching sign convention::

    S(Omega) = sum_n env(t_n) exp(+i Omega t_n) dt

so that a spectral phase ``phi(Omega)`` applied as ``exp(i phi)`` produces a
group delay ``+dphi/dOmega``.  Spectral samples are ordered by ascending
detuning ``Omega = omega - carrier``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridError

DEFAULT_POINTS = 2**15
SPAN_PER_DURATION = 8.0


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TimeGrid:
    n_points: int
    dt: float
    t0: float

    def __post_init__(self):
        if self.n_points < 2:
            raise GridError(f"n_points must be >= 2, got {self.n_points}")
        if not self.dt > 0:
            raise GridError(f"dt must be positive, got {self.dt}")

    @property
    def span(self) -> float:
        return self.n_points * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_points)

    def guard_band(self, duration: float) -> float:
        """Largest relative shift allowed for pulses of FWHM ``duration``.

        Keeps periodic copies of two stretched pulses from overlapping.
        """
        return self.span / 2 - 2.0 * duration


@dataclass(frozen=True)
class FrequencyGrid:
    n_points: int
    domega: float
    omega_offset: float

    def __post_init__(self):
        if not self.omega_offset > 0:
            raise GridError(f"carrier must be positive, got {self.omega_offset}")

    @property
    def detunings(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.domega

    @property
    def omegas(self) -> np.ndarray:
        return self.omega_offset + self.detunings

    @property
    def band(self) -> tuple[float, float]:
        half = self.n_points // 2 * self.domega
        return self.omega_offset - half, self.omega_offset + half - self.domega


def frequency_grid_for(grid: TimeGrid, carrier: float) -> FrequencyGrid:
    return FrequencyGrid(grid.n_points, 2 * np.pi / grid.span, carrier)


def make_grids(span_fs: float, n_points: int, carrier: float) -> tuple[TimeGrid, FrequencyGrid]:
    """Paired time and frequency grids with ``domega * dt * n_points = 2 pi``.

    The time grid is centred on t = 0.
    """
    if not _is_pow2(int(n_points)) or int(n_points) != n_points:
        raise GridError(f"n_points must be a power of two, got {n_points}")
    if not span_fs > 0:
        raise GridError(f"span must be positive, got {span_fs}")
    n_points = int(n_points)
    dt = span_fs / n_points
    tg = TimeGrid(n_points, dt, -span_fs / 2)
    return tg, frequency_grid_for(tg, carrier)


def grids_for_pulses(longest_duration: float, max_detuning: float, carrier: float,
                     n_points: int | None = None) -> tuple[TimeGrid, FrequencyGrid]:
    """Default grids for stretched pulses.

    ``max_detuning`` is the largest optical detuning (rad/fs) carrying
    appreciable spectral content; the grid must hold twice that after
    up-conversion without aliasing.
    """
    span = SPAN_PER_DURATION * longest_duration
    if n_points is None:
        dt_max = np.pi / (2.4 * max_detuning)
        n_points = DEFAULT_POINTS
        while span / n_points > dt_max:
            n_points *= 2
    return make_grids(span, n_points, carrier)


@dataclass(frozen=True)
class TemporalField:
    grid: TimeGrid
    carrier: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        samples = _readonly(self.samples)
        if samples.shape != (self.grid.n_points,):
            raise GridError(f"expected {self.grid.n_points} samples, got {samples.shape}")
        object.__setattr__(self, "samples", samples)

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.grid.dt)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def with_samples(self, samples, carrier: float | None = None) -> "TemporalField":
        return TemporalField(self.grid, self.carrier if carrier is None else carrier, samples)


@dataclass(frozen=True)
class SpectralField:
    grid: FrequencyGrid
    samples: np.ndarray = field(repr=False)
    time_grid: TimeGrid

    def __post_init__(self):
        samples = _readonly(self.samples)
        if samples.shape != (self.grid.n_points,):
            raise GridError(f"expected {self.grid.n_points} samples, got {samples.shape}")
        if self.time_grid.n_points != self.grid.n_points or not math.isclose(
                self.grid.domega * self.time_grid.span, 2 * np.pi, rel_tol=1e-12):
            raise GridError("frequency grid is not paired with the time grid")
        object.__setattr__(self, "samples", samples)

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.grid.domega / (2 * np.pi))

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def with_samples(self, samples) -> "SpectralField":
        return SpectralField(self.grid, samples, self.time_grid)


def _origin_phase(fgrid: FrequencyGrid, tgrid: TimeGrid) -> np.ndarray:
    return np.exp(1j * fgrid.detunings * tgrid.t0)


def to_spectrum(f: TemporalField) -> SpectralField:
    tg = f.grid
    fg = frequency_grid_for(tg, f.carrier)
    spec = tg.dt * tg.n_points * np.fft.fftshift(np.fft.ifft(f.samples))
    return SpectralField(fg, spec * _origin_phase(fg, tg), tg)


def from_spectrum(s: SpectralField) -> TemporalField:
    tg, fg = s.time_grid, s.grid
    env = fg.domega / (2 * np.pi) * np.fft.fft(np.fft.ifftshift(s.samples * np.conj(_origin_phase(fg, tg))))
    return TemporalField(tg, fg.omega_offset, env)


def gaussian_pulse(grids: tuple[TimeGrid, FrequencyGrid], fwhm_duration: float,
                   energy: float = 1.0) -> TemporalField:
    """Transform-limited Gaussian pulse centred at t = 0.

    ``fwhm_duration`` is the intensity FWHM in fs; the pulse carries
    ``energy`` (sum |E|^2 dt).
    """
    tg, fg = grids
    if not fwhm_duration > 4 * tg.dt:
        raise GridError(f"pulse FWHM {fwhm_duration} fs is unresolvable with dt = {tg.dt:.4g} fs")
    if energy < 0:
        raise GridError("pulse energy must be non-negative")
    t = tg.times
    env = np.exp(-2 * np.log(2) * t**2 / fwhm_duration**2).astype(complex)
    norm = np.sum(np.abs(env) ** 2) * tg.dt
    return TemporalField(tg, fg.omega_offset, env * np.sqrt(energy / norm))


def gaussian_spectrum_pulse(grids: tuple[TimeGrid, FrequencyGrid], spectral_fwhm: float,
                            energy: float = 1.0, centre_detuning: float = 0.0) -> SpectralField:
    """Transform-limited pulse given by its spectral intensity FWHM (rad/fs)."""
    tg, fg = grids
    det = fg.detunings - centre_detuning
    amp = np.exp(-2 * np.log(2) * det**2 / spectral_fwhm**2).astype(complex)
    s = SpectralField(fg, amp, tg)
    return s.with_samples(amp * np.sqrt(energy / s.energy)) if energy > 0 else s.with_samples(amp * 0)
