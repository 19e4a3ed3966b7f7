"""Data reduction for dips and fringe patterns."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from .errors import AmbiguityError, FitError, NoDipError, UndersampledError
from .experiment import Interferogram, SpectrumMap
from .units import omega_to_wavelength, stage_to_delay, wavelength_to_omega

log = logging.getLogger(__name__)

FWHM_PER_SIGMA = 2 * math.sqrt(2 * math.log(2))
EDGE_FRACTION = 0.10
TRIM_FRACTION = 0.05
MAX_ITER = 200
STEP_TOL = 1e-10


@dataclass(frozen=True)
class FitResult:
    visibility: float
    centre_um: float
    fwhm_um: float
    fwhm_fs: float
    baseline: float
    residual_rms: float
    converged: bool
    iterations: int

    def summary(self) -> dict:
        return {
            "visibility": self.visibility,
            "centre_um": self.centre_um,
            "fwhm_um": self.fwhm_um,
            "fwhm_fs": self.fwhm_fs,
            "baseline": self.baseline,
            "residual_rms": self.residual_rms,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def edge_baseline(signal, fraction: float = EDGE_FRACTION) -> float:
    """Mean over the outermost ``fraction`` of points on each side."""
    signal = np.asarray(signal, dtype=float)
    k = max(1, int(round(fraction * len(signal))))
    return float(np.mean(np.concatenate([signal[:k], signal[-k:]])))


def subtract_bias(trace: Interferogram, bias: float) -> Interferogram:
    """Remove a detector offset measured in the dark (``bias`` is usually negative)."""
    sig = trace.signal - bias
    notes = list(trace.notes)
    n_neg = int(np.sum(sig < 0))
    if n_neg:
        msg = f"{n_neg} samples negative after bias subtraction"
        log.warning(msg)
        notes.append(msg)
    return trace.with_signal(sig, notes)


def dip_visibility(trace: Interferogram) -> float:
    base = edge_baseline(trace.signal)
    if base == 0:
        raise NoDipError("zero baseline")
    return float((base - np.min(trace.signal)) / base)


def dip_model(x, baseline, visibility, centre, width):
    return baseline * (1 - visibility * np.exp(-((x - centre) ** 2) / (2 * width**2)))


def _jacobian(x, p):
    b, v, x0, w = p
    g = np.exp(-((x - x0) ** 2) / (2 * w**2))
    return np.column_stack([
        1 - v * g,
        -b * g,
        -b * v * g * (x - x0) / w**2,
        -b * v * g * (x - x0) ** 2 / w**3,
    ])


def initial_guess(x, y):
    base = edge_baseline(y)
    i = int(np.argmin(y))
    depth = base - y[i]
    if not depth > 0 or not np.isfinite(depth):
        raise NoDipError("trace has no dip below its baseline")
    half = base - depth / 2
    lo = i
    while lo > 0 and y[lo] < half:
        lo -= 1
    hi = i
    while hi < len(y) - 1 and y[hi] < half:
        hi += 1
    fwhm = max(x[hi] - x[lo], 2 * abs(x[1] - x[0]))
    return np.array([base, depth / base, x[i], fwhm / FWHM_PER_SIGMA])


def levenberg_marquardt(fun, jac, p0, max_iter: int = MAX_ITER, step_tol: float = STEP_TOL):
    """Damped Gauss-Newton with Marquardt diagonal scaling.

    Returns (params, iterations, converged).  Converged means the last
    accepted step changed every parameter by less than ``step_tol``, relative to
    max(abs(param), 1).
    """
    p = np.array(p0, dtype=float)
    r = fun(p)
    cost = r @ r
    lam = 1e-3
    for it in range(1, max_iter + 1):
        J = jac(p)
        JtJ = J.T @ J
        g = J.T @ r
        diag = np.diag(JtJ).copy()
        diag[diag == 0] = 1.0
        while True:
            try:
                step = np.linalg.solve(JtJ + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            trial = p + step
            r_new = fun(trial)
            cost_new = r_new @ r_new
            if np.isfinite(cost_new) and cost_new <= cost:
                lam = max(lam / 10, 1e-15)
                break
            lam *= 10
            if lam > 1e16:
                return p, it, False
        rel = np.max(np.abs(step) / np.maximum(np.abs(trial), 1.0))
        p, r, cost = trial, r_new, cost_new
        if rel < step_tol or cost == 0:
            return p, it, True
    return p, max_iter, False


def fit_gaussian_dip(trace: Interferogram) -> FitResult:
    """Least-squares fit of B [1 - V exp(-(x - x0)^2 / 2 w^2)] in stage position."""
    x = np.asarray(trace.stage_positions, dtype=float)
    y = np.asarray(trace.signal, dtype=float)
    if len(x) < 10:
        raise FitError(f"need at least 10 points, got {len(x)}")
    # fit in normalised units so the relative step criterion is scale free
    scale = edge_baseline(y)
    if scale == 0:
        raise NoDipError("zero baseline")
    xc, xs = x.mean(), (x.max() - x.min()) / 2 or 1.0
    u, yn = (x - xc) / xs, y / scale
    p0 = initial_guess(u, yn)
    p, it, ok = levenberg_marquardt(lambda q: dip_model(u, *q) - yn, lambda q: _jacobian(u, q), p0)
    b, v, x0, w = p
    w = abs(w) * xs
    fwhm = FWHM_PER_SIGMA * w
    resid = dip_model(u, *p) - yn
    if not ok:
        log.warning("Gaussian dip fit did not converge after %d iterations", it)
    return FitResult(
        visibility=float(v),
        centre_um=float(xc + x0 * xs),
        fwhm_um=float(fwhm),
        fwhm_fs=float(stage_to_delay(fwhm)),
        baseline=float(b * scale),
        residual_rms=float(np.sqrt(np.mean(resid**2)) * scale),
        converged=bool(ok),
        iterations=int(it),
    )


def samples_per_fringe(signal) -> float:
    y = np.asarray(signal, dtype=float)
    y = y - y.mean()
    spec = np.abs(np.fft.rfft(y))
    if spec[1:].max() <= 1e-12 * max(np.abs(y).max(), 1e-300) * len(y):
        return math.inf
    k = int(np.argmax(spec[1:])) + 1
    return len(y) / k


def hilbert_envelope(trace: Interferogram, min_samples_per_fringe: float = 8.0) -> np.ndarray:
    """Magnitude of the analytic signal of the mean-subtracted trace."""
    y = np.asarray(trace.signal, dtype=float)
    if np.ptp(y) > 0 and samples_per_fringe(y) < min_samples_per_fringe:
        raise UndersampledError(
            f"fringes sampled at {samples_per_fringe(y):.3g} points per period; need >= {min_samples_per_fringe}")
    return np.abs(hilbert(y - y.mean()))


def envelope_fwhm_centre(envelope, axis, trim: float = TRIM_FRACTION) -> tuple[float, float]:
    """FWHM by linear interpolation at half maximum, centre as the half-max centroid.

    ``trim`` of the samples are discarded at each end first (analytic-signal
    end transients).
    """
    env = np.asarray(envelope, dtype=float)
    ax = np.asarray(axis, dtype=float)
    k = int(round(trim * len(env)))
    if k:
        env, ax = env[k:-k], ax[k:-k]
    peak = int(np.argmax(env))
    half = env[peak] / 2
    above = env >= half
    idx = np.flatnonzero(above)
    if np.any(np.diff(idx) > 1):
        raise AmbiguityError("more than one lobe rises above half maximum")
    lo, hi = idx[0], idx[-1]
    if lo == 0 or hi == len(env) - 1:
        raise AmbiguityError("envelope does not fall to half maximum inside the trace")

    def cross(i, j):
        return ax[i] + (half - env[i]) * (ax[j] - ax[i]) / (env[j] - env[i])

    left = cross(lo - 1, lo)
    right = cross(hi, hi + 1)
    region = slice(lo, hi + 1)
    centre = float(np.sum(env[region] * ax[region]) / np.sum(env[region]))
    return float(right - left), centre


def fringe_visibility(trace: Interferogram) -> float:
    """(max - min)/(max + min) of the fringes, via envelope peak over baseline."""
    base = edge_baseline(trace.signal)
    env = hilbert_envelope(trace)
    k = int(round(TRIM_FRACTION * len(env)))
    return float(np.max(env[k:len(env) - k]) / base)


def measure_fwhm(x, y) -> float:
    """FWHM of a single-peaked profile, linear interpolation, no trimming."""
    return envelope_fwhm_centre(y, x, trim=0.0)[0]


def branch_centroids(smap: SpectrumMap, centre_nm: float, threshold: float = 0.2) -> np.ndarray:
    """Frequency centroids (rad/fs) of the two cross-correlation branches per map row.

    Each row is split at ``centre_nm``; samples below ``threshold`` of the row
    maximum are ignored.  Rows with an empty side give NaN.
    Returns shape (n_rows, 2): (low-frequency branch, high-frequency branch).
    """
    om = wavelength_to_omega(smap.wavelengths)
    c0 = wavelength_to_omega(centre_nm)
    out = np.full((len(smap.stage_positions), 2), np.nan)
    for i, row in enumerate(np.asarray(smap.power, dtype=float)):
        keep = row > threshold * row.max()
        for j, side in enumerate((keep & (om < c0), keep & (om > c0))):
            if side.any():
                out[i, j] = np.sum(om[side] * row[side]) / np.sum(row[side])
    return out


def branch_midpoints_nm(centroids) -> np.ndarray:
    return omega_to_wavelength(np.mean(centroids, axis=1))
