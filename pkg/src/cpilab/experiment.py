"""Experiment configuration and result containers shared by the engines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .grids import grids_for_pulses
from .optics import VACUUM, BandpassFilter, ChirpSpec, SampleStack, chirp_for_duration, transform_limit
from .units import bandwidth_nm_to_omega, stage_to_delay, wavelength_to_omega

LAB_LASER_NM = 790.0
LAB_LASER_FWHM_FS = 110.0


@dataclass(frozen=True)
class Laser:
    centre_nm: float = LAB_LASER_NM
    fwhm_duration_fs: float = LAB_LASER_FWHM_FS

    @property
    def omega(self) -> float:
        return wavelength_to_omega(self.centre_nm)

    @property
    def spectral_fwhm(self) -> float:
        return 4 * math.log(2) / self.fwhm_duration_fs


@dataclass(frozen=True)
class PulseArm:
    """One stretched pulse: Gaussian spectrum of FWHM ``bandwidth_nm`` plus a chirp."""
    bandwidth_nm: float
    chirp: ChirpSpec

    def spectral_fwhm(self, centre_nm: float) -> float:
        return bandwidth_nm_to_omega(self.bandwidth_nm, centre_nm)

    def duration(self, centre_nm: float) -> float:
        """Stretched intensity FWHM (fs), exact for a Gaussian spectrum."""
        dw = self.spectral_fwhm(centre_nm)
        tl = transform_limit(dw)
        return tl * math.sqrt(1 + (self.chirp.A * dw**2 / (2 * math.log(2))) ** 2)


@dataclass(frozen=True)
class Detector:
    """Per-pulse integrating detector.

    ``background`` is an absolute additive level; ``background_fraction`` adds
    that fraction of the off-dip signal level (resolved by the CPI engine).
    ``bias`` is a dark offset removed by analysis.subtract_bias.
    """
    background: float = 0.0
    background_fraction: float = 0.0
    bias: float = 0.0

    def __post_init__(self):
        if self.background < 0 or self.background_fraction < 0:
            raise ConfigError("detector background must be >= 0")


@dataclass(frozen=True)
class OpticalSetup:
    laser: Laser
    chirped: PulseArm
    antichirped: PulseArm
    filter: BandpassFilter
    sample: SampleStack = VACUUM
    sample_transmission: float = 1.0
    sfg_acceptance_nm: float | None = None
    detector: Detector = field(default_factory=Detector)
    n_points: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.sample_transmission <= 1.0:
            raise ConfigError(f"sample transmission {self.sample_transmission} outside [0, 1]")
        if self.chirped.chirp.A <= 0 or self.antichirped.chirp.A >= 0:
            raise ConfigError("chirped arm needs A > 0 and anti-chirped arm A < 0")
        if self.sfg_acceptance_nm is not None and not self.sfg_acceptance_nm > 0:
            raise ConfigError("SFG acceptance FWHM must be positive")
        if abs(self.filter.centre_omega - 2 * self.laser.omega) > 0.1 * self.laser.omega:
            raise ConfigError(f"filter centre {self.filter.centre_nm} nm is far from the SFG band")

    def replace(self, **changes) -> "OpticalSetup":
        return replace(self, **changes)

    @property
    def omega0(self) -> float:
        return self.laser.omega

    @property
    def longest_duration(self) -> float:
        return max(self.chirped.duration(self.laser.centre_nm),
                   self.antichirped.duration(self.laser.centre_nm)) + abs(self.antichirped.chirp.overlap_offset)

    @property
    def widest_spectrum(self) -> float:
        return max(self.chirped.spectral_fwhm(self.laser.centre_nm),
                   self.antichirped.spectral_fwhm(self.laser.centre_nm))

    def grids(self):
        sigma = self.widest_spectrum / (2 * math.sqrt(2 * math.log(2)))
        offset = abs(self.effective_centre - self.omega0)
        return grids_for_pulses(self.longest_duration, 5 * sigma + offset, self.omega0, self.n_points)

    @property
    def sum_frequency_shift(self) -> float:
        """Shift of the cross-correlation sum frequency from 2*omega0 (rad/fs)."""
        inv = 1 / self.chirped.chirp.A + 1 / abs(self.antichirped.chirp.A)
        return self.antichirped.chirp.overlap_offset * inv / 4

    @property
    def effective_centre(self) -> float:
        """Optical frequency about which the photon pairs are symmetric (rad/fs)."""
        return self.omega0 + self.sum_frequency_shift / 2

    @property
    def harmonic_chirp(self) -> float:
        """|A| entering the branch separation tau/|A| for unequal chirp magnitudes."""
        return 2 / (1 / self.chirped.chirp.A + 1 / abs(self.antichirped.chirp.A))


def offset_for_sfg_wavelength(target_nm: float, laser_nm: float, A_chirped: float, A_anti: float) -> float:
    """Arrival offset of the anti-chirped pulse that moves the SFG centre to ``target_nm``."""
    shift = wavelength_to_omega(target_nm) - 2 * wavelength_to_omega(laser_nm)
    return 4 * shift / (1 / A_chirped + 1 / abs(A_anti))


def build_setup(*, laser: Laser = Laser(),
                chirped_duration_fs: float = 51200.0, chirped_bandwidth_nm: float = 10.0,
                antichirped_duration_fs: float = 45000.0, antichirped_bandwidth_nm: float = 9.0,
                chirp_fs2: float | None = None, chirp_scale: float = 1.0,
                overlap_offset_fs: float | None = None, sfg_centre_nm: float | None = None,
                filter_centre_nm: float | None = None, filter_fwhm_nm: float = 0.4,
                filter_shape: str = "gaussian", sample: SampleStack = VACUUM,
                sample_transmission: float = 1.0, sfg_acceptance_nm: float | None = None,
                detector: Detector = Detector(), n_points: int | None = None) -> OpticalSetup:
    """Assemble an OpticalSetup from lab-style quantities.

    Chirps come from the stated stretched durations and bandwidths unless
    ``chirp_fs2`` fixes a common magnitude.  ``sfg_centre_nm`` tunes the
    overlap offset; ``filter_centre_nm`` defaults to the tuned SFG centre.
    """
    lam = laser.centre_nm
    if chirp_fs2 is not None:
        a_c, a_a = abs(chirp_fs2), -abs(chirp_fs2)
    else:
        a_c = chirp_for_duration(chirped_duration_fs, bandwidth_nm_to_omega(chirped_bandwidth_nm, lam), 1).A
        a_a = chirp_for_duration(antichirped_duration_fs, bandwidth_nm_to_omega(antichirped_bandwidth_nm, lam), -1).A
    a_c, a_a = a_c * chirp_scale, a_a * chirp_scale
    if overlap_offset_fs is not None and sfg_centre_nm is not None:
        raise ConfigError("give either an overlap offset or an SFG centre wavelength, not both")
    if sfg_centre_nm is not None:
        offset = offset_for_sfg_wavelength(sfg_centre_nm, lam, a_c, a_a)
    else:
        offset = overlap_offset_fs or 0.0
        sfg_centre_nm = lam / 2
    if filter_centre_nm is None:
        filter_centre_nm = sfg_centre_nm
    return OpticalSetup(
        laser=laser,
        chirped=PulseArm(chirped_bandwidth_nm, ChirpSpec(a_c)),
        antichirped=PulseArm(antichirped_bandwidth_nm, ChirpSpec(a_a, offset)),
        filter=BandpassFilter(filter_centre_nm, filter_fwhm_nm, filter_shape),
        sample=sample,
        sample_transmission=sample_transmission,
        sfg_acceptance_nm=sfg_acceptance_nm,
        detector=detector,
        n_points=n_points,
    )


def lab_setup(**overrides) -> OpticalSetup:
    """Reported laboratory parameters: 790 nm / 110 fs laser, 51.2 ps (10 nm)
    chirped and 45 ps (9 nm) anti-chirped pulses, 0.4 nm filter at 395.9 nm."""
    kwargs = dict(sfg_centre_nm=395.9)
    kwargs.update(overrides)
    return build_setup(**kwargs)


@dataclass(frozen=True)
class Scan:
    start_um: float
    stop_um: float
    step_um: float

    def __post_init__(self):
        if not self.step_um > 0 or self.stop_um < self.start_um:
            raise ConfigError(f"degenerate scan {self}")

    @property
    def positions(self) -> np.ndarray:
        n = int(math.floor((self.stop_um - self.start_um) / self.step_um + 1e-9)) + 1
        return self.start_um + self.step_um * np.arange(n)

    @classmethod
    def centred(cls, centre_um: float, half_width_um: float, step_um: float) -> "Scan":
        n = int(round(half_width_um / step_um))
        return cls(centre_um - n * step_um, centre_um + n * step_um, step_um)


@dataclass(frozen=True)
class Interferogram:
    stage_positions: np.ndarray
    delays: np.ndarray
    signal: np.ndarray
    kind: str
    notes: tuple[str, ...] = ()

    KINDS = ("cpi-dip", "wli-fringes", "hom-dip")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown interferogram kind {self.kind!r}")
        n = len(self.stage_positions)
        if len(self.delays) != n or len(self.signal) != n:
            raise ValueError("interferogram arrays must have equal length")

    @classmethod
    def from_positions(cls, positions, signal, kind: str, notes=()) -> "Interferogram":
        positions = np.asarray(positions, dtype=float)
        return cls(positions, stage_to_delay(positions) * np.ones_like(positions),
                   np.asarray(signal, dtype=float), kind, tuple(notes))

    def with_signal(self, signal, notes=None) -> "Interferogram":
        return replace(self, signal=np.asarray(signal, dtype=float),
                       notes=self.notes if notes is None else tuple(notes))

    @property
    def step_um(self) -> float:
        return float(self.stage_positions[1] - self.stage_positions[0])


@dataclass(frozen=True)
class SpectrumMap:
    stage_positions: np.ndarray
    wavelengths: np.ndarray
    power: np.ndarray
