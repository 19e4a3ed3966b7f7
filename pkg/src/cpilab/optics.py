"""Linear optical elements acting on analytic-envelope fields.

Material phases are measured relative to vacuum, ``phi(omega) = [k(omega) -
omega/c] L``, so an empty stack is a no-op and the group delay reported for a
stack is the *excess* delay over the same length of air-free path.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass
from importlib import resources
from typing import Union

import numpy as np

from .errors import GridError, MaterialError, WrapAroundError
from .grids import FrequencyGrid, SpectralField, TemporalField, from_spectrum, to_spectrum
from .units import C_UM_PER_FS, bandwidth_nm_to_omega, omega_to_wavelength, wavelength_to_omega

UM_PER_MM = 1000.0
MATERIALS_ENV = "CPILAB_MATERIALS"

Field = Union[TemporalField, SpectralField]


@dataclass(frozen=True)
class Sellmeier:
    b: tuple[float, ...]
    c_um2: tuple[float, ...]
    range_um: tuple[float, float] | None = None

    def __post_init__(self):
        if len(self.b) != len(self.c_um2) or not self.b:
            raise MaterialError("Sellmeier model needs matching, non-empty B and C lists")

    def n_squared(self, wavelength_um):
        l2 = np.asarray(wavelength_um, dtype=float) ** 2
        return 1.0 + sum(b * l2 / (l2 - c) for b, c in zip(self.b, self.c_um2))

    def index(self, wavelength_um):
        return np.sqrt(self.n_squared(wavelength_um))

    def check_band(self, omega_min: float, omega_max: float, name: str = "material"):
        lam_lo = float(omega_to_wavelength(omega_max)) / 1000
        lam_hi = float(omega_to_wavelength(omega_min)) / 1000
        for c in self.c_um2:
            if lam_lo**2 <= c <= lam_hi**2:
                raise MaterialError(f"{name}: Sellmeier pole at {math.sqrt(c):.4g} um inside the band")
        if self.range_um is not None:
            lo, hi = self.range_um
            if lam_lo < lo or lam_hi > hi:
                raise MaterialError(
                    f"{name}: band {lam_lo:.4g}-{lam_hi:.4g} um outside validity range {lo}-{hi} um")
        if np.any(self.n_squared(np.array([lam_lo, lam_hi])) <= 1.0):
            raise MaterialError(f"{name}: n^2 <= 1 inside the band")

    def phase_per_mm(self, omega):
        omega = np.asarray(omega, dtype=float)
        lam_um = omega_to_wavelength(omega) / 1000
        return (self.index(lam_um) - 1.0) * omega / C_UM_PER_FS * UM_PER_MM


@dataclass(frozen=True)
class Taylor:
    alpha: float = 0.0
    beta: float = 0.0
    reference_omega: float = 1.0
    higher: tuple[float, ...] = ()

    def coefficients(self) -> list[float]:
        """Polynomial coefficients of W^1, W^2, ... (per mm)."""
        return [self.alpha, self.beta, *self.higher]

    def check_band(self, omega_min: float, omega_max: float, name: str = "material"):
        if not omega_min <= self.reference_omega <= omega_max:
            raise MaterialError(f"{name}: Taylor reference frequency outside the band")

    def phase_per_mm(self, omega):
        w = np.asarray(omega, dtype=float) - self.reference_omega
        return sum(c * w ** (k + 1) for k, c in enumerate(self.coefficients()))

    def derivative_per_mm(self, omega, order: int):
        w = np.asarray(omega, dtype=float) - self.reference_omega
        out = 0.0
        for k, c in enumerate(self.coefficients()):
            p = k + 1
            if p >= order:
                out = out + c * math.perm(p, order) * w ** (p - order)
        return out

    def odd_part_per_mm(self, omega0: float, detuning):
        """phi(omega0 + W) - phi(omega0 - W) with even orders dropped analytically."""
        if omega0 != self.reference_omega:
            return self.phase_per_mm(omega0 + detuning) - self.phase_per_mm(omega0 - detuning)
        w = np.asarray(detuning, dtype=float)
        return sum(2 * c * w ** (k + 1) for k, c in enumerate(self.coefficients()) if k % 2 == 0)


Model = Union[Sellmeier, Taylor]


@dataclass(frozen=True)
class MaterialSpec:
    name: str
    model: Model

    def phase_per_mm(self, omega):
        return self.model.phase_per_mm(omega)


@dataclass(frozen=True)
class SampleStack:
    layers: tuple[tuple[MaterialSpec, float], ...] = ()

    def __post_init__(self):
        layers = tuple((m, float(L)) for m, L in self.layers)
        for m, L in layers:
            if L < 0:
                raise MaterialError(f"negative thickness {L} mm for {m.name}")
        object.__setattr__(self, "layers", layers)

    def __bool__(self):
        return any(L > 0 for _, L in self.layers)

    def phase(self, omega):
        omega = np.asarray(omega, dtype=float)
        total = np.zeros_like(omega)
        for m, L in self.layers:
            total = total + m.phase_per_mm(omega) * L
        return total

    def odd_phase(self, omega0: float, detuning):
        """phi(omega0 + W) - phi(omega0 - W), exact for every layer type."""
        detuning = np.asarray(detuning, dtype=float)
        total = np.zeros_like(detuning)
        for m, L in self.layers:
            if isinstance(m.model, Taylor):
                total = total + m.model.odd_part_per_mm(omega0, detuning) * L
            else:
                total = total + (m.phase_per_mm(omega0 + detuning) - m.phase_per_mm(omega0 - detuning)) * L
        return total

    def check_band(self, omega_min: float, omega_max: float):
        for m, L in self.layers:
            m.model.check_band(omega_min, omega_max, m.name)

    @property
    def total_thickness(self) -> float:
        return sum(L for _, L in self.layers)


VACUUM = SampleStack()


@dataclass(frozen=True)
class ChirpSpec:
    """Quadratic spectral phase ``A * Omega^2`` plus an arrival-time offset.

    A > 0 is a normal (blue-lags-red) chirp, A < 0 anomalous.
    """
    A: float
    overlap_offset: float = 0.0


# -- materials file ---------------------------------------------------------

def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _material_from_section(name: str, sec) -> MaterialSpec:
    keys = set(sec.keys())
    kind = sec.get("model", "").strip().lower()
    if kind == "sellmeier":
        allowed = {"model", "b", "c_um2", "range_um"}
        if keys - allowed:
            raise MaterialError(f"{name}: unknown keys {sorted(keys - allowed)}")
        rng = _floats(sec["range_um"]) if "range_um" in sec else None
        try:
            return MaterialSpec(name, Sellmeier(_floats(sec["b"]), _floats(sec["c_um2"]), rng))
        except KeyError as exc:
            raise MaterialError(f"{name}: missing key {exc}") from None
    if kind == "taylor":
        allowed = {"model", "alpha_fs_per_mm", "beta_fs2_per_mm", "higher_fsn_per_mm",
                   "reference_wavelength_nm"}
        if keys - allowed:
            raise MaterialError(f"{name}: unknown keys {sorted(keys - allowed)}")
        try:
            ref = wavelength_to_omega(float(sec["reference_wavelength_nm"]))
        except KeyError:
            raise MaterialError(f"{name}: Taylor model needs reference_wavelength_nm") from None
        return MaterialSpec(name, Taylor(
            alpha=float(sec.get("alpha_fs_per_mm", 0.0)),
            beta=float(sec.get("beta_fs2_per_mm", 0.0)),
            reference_omega=ref,
            higher=_floats(sec.get("higher_fsn_per_mm", "")),
        ))
    raise MaterialError(f"{name}: unknown model type {kind!r}")


def default_materials_path():
    env = os.environ.get(MATERIALS_ENV)
    if env:
        return env
    return resources.files("cpilab") / "data" / "materials.ini"


def load_materials(path=None) -> dict[str, MaterialSpec]:
    """Read a materials file (INI) into a name -> MaterialSpec mapping."""
    path = default_materials_path() if path is None else path
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        if isinstance(path, (str, os.PathLike)):
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = path.read_text(encoding="utf-8")
        parser.read_string(text)
    except (OSError, configparser.Error) as exc:
        raise MaterialError(f"cannot read materials file {path}: {exc}") from None
    return {name.lower(): _material_from_section(name.lower(), parser[name])
            for name in parser.sections()}


def lookup_material(materials: dict[str, MaterialSpec], name: str) -> MaterialSpec:
    try:
        return materials[name.lower()]
    except KeyError:
        raise MaterialError(f"unknown material {name!r}; known: {sorted(materials)}") from None


# -- dispersion -------------------------------------------------------------

GD_STEP = 1e-4
GVD_STEP = 2e-3


def material_phase(stack: SampleStack, grid: FrequencyGrid) -> np.ndarray:
    """Spectral phase (rad) of the stack relative to vacuum on ``grid``."""
    lo, hi = grid.band
    stack.check_band(lo, hi)
    return stack.phase(grid.omegas)


def _check_eval(stack: SampleStack, omega: float, step: float):
    # point evaluations only need a valid Sellmeier window; a Taylor
    # expansion is defined everywhere and its reference need not be nearby
    for m, _ in stack.layers:
        if not isinstance(m.model, Taylor):
            m.model.check_band(omega - 2 * step, omega + 2 * step, m.name)


def group_delay(stack: SampleStack, omega_eval: float) -> float:
    """d(phi)/d(omega) in fs: analytic for Taylor layers, centred differences otherwise."""
    _check_eval(stack, omega_eval, GVD_STEP)
    total = 0.0
    for m, L in stack.layers:
        if isinstance(m.model, Taylor):
            total += float(m.model.derivative_per_mm(omega_eval, 1)) * L
        else:
            h = GD_STEP
            total += float(m.phase_per_mm(omega_eval + h) - m.phase_per_mm(omega_eval - h)) / (2 * h) * L
    return total


def gvd(stack: SampleStack, omega_eval: float) -> float:
    """Half the second derivative of the phase (fs^2); equals beta*L for a Taylor layer."""
    _check_eval(stack, omega_eval, GVD_STEP)
    total = 0.0
    for m, L in stack.layers:
        if isinstance(m.model, Taylor):
            total += 0.5 * float(m.model.derivative_per_mm(omega_eval, 2)) * L
        else:
            h = GVD_STEP
            p = m.phase_per_mm(np.array([omega_eval - h, omega_eval, omega_eval + h]))
            total += 0.5 * float(p[0] - 2 * p[1] + p[2]) / h**2 * L
    return total


def finite_difference_dispersion(stack: SampleStack, omega_eval: float,
                                 h_gd: float = GD_STEP, h_gvd: float = GVD_STEP) -> tuple[float, float]:
    """(group delay, gvd) from centred differences of the summed stack phase, any model."""
    p = stack.phase(np.array([omega_eval - h_gd, omega_eval + h_gd]))
    q = stack.phase(np.array([omega_eval - h_gvd, omega_eval, omega_eval + h_gvd]))
    return float(p[1] - p[0]) / (2 * h_gd), 0.5 * float(q[0] - 2 * q[1] + q[2]) / h_gvd**2


def group_index(stack: SampleStack, omega_eval: float) -> float:
    """Thickness-weighted mean group index of the stack."""
    L_um = stack.total_thickness * UM_PER_MM
    return 1.0 + group_delay(stack, omega_eval) * C_UM_PER_FS / L_um


# -- field operations -------------------------------------------------------

def apply_spectral_phase(s: SpectralField, phase) -> SpectralField:
    phase = np.asarray(phase, dtype=float)
    if phase.shape != s.samples.shape:
        raise GridError(f"phase length {phase.shape} does not match field {s.samples.shape}")
    return s.with_samples(s.samples * np.exp(1j * phase))


def chirp_phase(grid: FrequencyGrid, chirp: ChirpSpec) -> np.ndarray:
    return chirp.A * grid.detunings**2


def transform_limit(spectral_fwhm: float) -> float:
    """Intensity FWHM (fs) of a Gaussian pulse with spectral intensity FWHM in rad/fs."""
    return 4 * math.log(2) / spectral_fwhm


def chirp_for_duration(target_duration: float, spectral_fwhm: float, sign: int = 1) -> ChirpSpec:
    """Chirp coefficient that stretches a Gaussian pulse to ``target_duration``.

    Uses the stationary-phase mapping t = 2 A Omega, so A = T / (2 dOmega).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if target_duration < 10 * transform_limit(spectral_fwhm):
        raise GridError(
            f"target {target_duration} fs is below 10x the transform limit "
            f"{transform_limit(spectral_fwhm):.4g} fs")
    return ChirpSpec(sign * target_duration / (2 * spectral_fwhm))


def _same_frame(a: TemporalField, b: TemporalField):
    if a.grid != b.grid or a.carrier != b.carrier:
        raise GridError("fields live on different grids or carriers")


def beamsplitter_combine(chirped: TemporalField, antichirped: TemporalField):
    """Lossless 50/50 beamsplitter: returns ((c + a)/sqrt2, (c - a)/sqrt2)."""
    _same_frame(chirped, antichirped)
    r = 1 / math.sqrt(2)
    c, a = chirped.samples, antichirped.samples
    return chirped.with_samples((c + a) * r), chirped.with_samples((c - a) * r)


def attenuate(f: Field, transmission: float) -> Field:
    if not 0.0 <= transmission <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {transmission}")
    return f.with_samples(f.samples * math.sqrt(transmission))


def delay_field(f: Field, tau: float, guard: float | None = None) -> Field:
    """Exact time translation E(t) -> E(t - tau) of the full field.

    The envelope is shifted spectrally and the carrier phase rotated by
    exp(+i carrier tau) (sign fixed by the exp(-i omega t) convention).
    ``guard`` bounds |tau|; it defaults to a quarter of the grid span.
    """
    spectral = isinstance(f, SpectralField)
    s = f if spectral else to_spectrum(f)
    span = s.time_grid.span
    guard = span / 4 if guard is None else guard
    if abs(tau) > guard:
        raise WrapAroundError(f"shift {tau:.6g} fs exceeds guard band {guard:.6g} fs")
    out = s.with_samples(s.samples * np.exp(1j * s.grid.omegas * tau))
    return out if spectral else from_spectrum(out)


@dataclass(frozen=True)
class BandpassFilter:
    centre_nm: float
    fwhm_nm: float
    shape: str = "gaussian"

    def __post_init__(self):
        if self.shape not in ("gaussian", "rect"):
            raise ValueError(f"unknown filter shape {self.shape!r}")
        if not self.fwhm_nm > 0:
            raise ValueError("filter FWHM must be positive")

    @property
    def centre_omega(self) -> float:
        return wavelength_to_omega(self.centre_nm)

    @property
    def fwhm_omega(self) -> float:
        return bandwidth_nm_to_omega(self.fwhm_nm, self.centre_nm)

    def amplitude(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        if math.isinf(self.fwhm_nm):
            return np.ones_like(omega)
        d = omega - self.centre_omega
        if self.shape == "rect":
            return (np.abs(d) <= self.fwhm_omega / 2).astype(float)
        return np.exp(-2 * math.log(2) * d**2 / self.fwhm_omega**2)


def bandpass_filter(s: SpectralField, centre_nm: float, fwhm_nm: float,
                    shape: str = "gaussian") -> SpectralField:
    """Multiply by a filter whose intensity transmission has FWHM ``fwhm_nm``."""
    filt = BandpassFilter(centre_nm, fwhm_nm, shape)
    lo, hi = s.grid.band
    if not lo <= filt.centre_omega <= hi:
        raise GridError(f"filter centre {centre_nm} nm lies outside the grid band")
    return s.with_samples(s.samples * filt.amplitude(s.grid.omegas))
