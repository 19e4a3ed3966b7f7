"""Unit conventions used throughout the package.

time: fs, angular frequency: rad/fs, wavelength: nm, sample thickness: mm,
stage position: um.
"""

import numpy as np

C_UM_PER_FS = 0.299792458
C_NM_PER_FS = 299.792458


def _as_out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def wavelength_to_omega(wavelength_nm):
    return _as_out(2 * np.pi * C_NM_PER_FS / np.asarray(wavelength_nm, dtype=float))


def omega_to_wavelength(omega):
    return _as_out(2 * np.pi * C_NM_PER_FS / np.asarray(omega, dtype=float))


def bandwidth_nm_to_omega(fwhm_nm, centre_nm):
    """Convert a wavelength FWHM at ``centre_nm`` to angular frequency (rad/fs)."""
    return 2 * np.pi * C_NM_PER_FS * fwhm_nm / centre_nm**2


def bandwidth_omega_to_nm(fwhm_omega, centre_nm):
    return fwhm_omega * centre_nm**2 / (2 * np.pi * C_NM_PER_FS)


def stage_to_delay(position_um):
    # retro-reflector: the delay arm is traversed twice
    return _as_out(2.0 * np.asarray(position_um, dtype=float) / C_UM_PER_FS)


def delay_to_stage(delay_fs):
    return _as_out(np.asarray(delay_fs, dtype=float) * C_UM_PER_FS / 2.0)
