"""Command-line runner: one subcommand per experiment, CSV out, JSON summary on stdout.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .analysis import (branch_centroids, branch_midpoints_nm, envelope_fwhm_centre, fit_gaussian_dip,
                       fringe_visibility, hilbert_envelope, subtract_bias)
from .config import ExperimentConfig, parse_config, shipped_config
from .cpi import CPIEngine, expected_dip_position
from .errors import ConfigError, FitError, GridError, NumericalError
from .hom import hom_dip, product_spectrum
from .io import SWEEP_HEADER, read_trace, write_gnuplot, write_map, write_rows, write_trace
from .optics import SampleStack, group_delay, group_index, gvd
from .units import delay_to_stage, omega_to_wavelength, stage_to_delay
from .wli import WLIEngine

log = logging.getLogger("cpilab")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def load_config(name: str) -> ExperimentConfig:
    if os.path.exists(name):
        return parse_config(name)
    return parse_config(shipped_config(name))


def _fit_summary(trace):
    fit = fit_gaussian_dip(trace)
    if not fit.converged:
        raise FitError(f"dip fit did not converge in {fit.iterations} iterations")
    return fit.summary()


def _bias_corrected(trace, setup):
    return subtract_bias(trace, setup.detector.bias) if setup.detector.bias else trace


def run_cpi_dip(cfg: ExperimentConfig, out: str, threads: int) -> dict:
    trace = CPIEngine(cfg.setup).interferogram(cfg.dip_scan, threads)
    write_trace(out, trace)
    summary = _fit_summary(_bias_corrected(trace, cfg.setup))
    summary["expected_centre_um"] = expected_dip_position(cfg.setup)
    summary["points"] = len(trace.signal)
    return summary


def run_spectrum_map(cfg: ExperimentConfig, out: str, threads: int) -> dict:
    setup = cfg.setup
    smap = CPIEngine(setup).spectrum_map(cfg.map_scan, cfg.map_window_nm, threads)
    write_map(out, smap)
    cents = branch_centroids(smap, setup.filter.centre_nm)
    x = smap.stage_positions - expected_dip_position(setup)
    sep = cents[:, 1] - cents[:, 0]
    # linear region: well outside the dip, both branches resolved
    sel = np.isfinite(sep) & (np.abs(x) >= cfg.map_scan.step_um * 3)
    summary = {"positions": len(smap.stage_positions), "wavelengths": len(smap.wavelengths),
               "expected_slope_rad_per_fs2": 1 / setup.harmonic_chirp}
    if np.count_nonzero(sel) >= 2:
        slope = np.polyfit(stage_to_delay(np.abs(x[sel])), sep[sel], 1)[0]
        summary["branch_slope_rad_per_fs2"] = float(slope)
        summary["branch_midpoint_nm"] = float(np.median(branch_midpoints_nm(cents[sel])))
    return summary


def run_wli(cfg: ExperimentConfig, out: str, threads: int) -> dict:
    trace = WLIEngine(cfg.setup).interferogram(cfg.wli_scan)
    write_trace(out, trace)
    env = hilbert_envelope(trace)
    fwhm_um, centre = envelope_fwhm_centre(env, trace.stage_positions)
    return {"envelope_fwhm_um": fwhm_um, "envelope_fwhm_fs": float(stage_to_delay(fwhm_um)),
            "centre_um": centre, "fringe_visibility": fringe_visibility(trace),
            "points": len(trace.signal)}


def run_hom_dip(cfg: ExperimentConfig, out: str, threads: int) -> dict:
    setup = cfg.setup
    trace = hom_dip(product_spectrum(setup), setup.sample, cfg.dip_scan, setup.effective_centre)
    write_trace(out, trace)
    summary = _fit_summary(trace)
    summary["points"] = len(trace.signal)
    return summary


def run_loss_sweep(cfg: ExperimentConfig, out: str, threads: int) -> dict:
    rows = []
    for eta in cfg.sweep_transmissions:
        setup = cfg.setup.replace(sample_transmission=eta)
        cpi = fit_gaussian_dip(CPIEngine(setup).interferogram(cfg.dip_scan, threads)).visibility
        wli = fringe_visibility(WLIEngine(setup).interferogram(cfg.wli_scan))
        rows.append((eta, cpi, wli, 2 * np.sqrt(eta) / (1 + eta)))
    write_rows(out, SWEEP_HEADER, rows)
    cpi_v = [r[1] for r in rows]
    return {"transmissions": [r[0] for r in rows], "cpi_visibility": cpi_v,
            "wli_visibility": [r[2] for r in rows],
            "cpi_spread": float(max(cpi_v) - min(cpi_v))}


def run_group_delay(cfg: ExperimentConfig, out: str, threads: int) -> dict:
    setup = cfg.setup
    w0, we = setup.omega0, setup.effective_centre
    rows, report = [], []
    header = ("material", "thickness_mm", "group_delay_fs", "gdd_fs2", "group_index", "stage_shift_um")
    for material, length in setup.sample.layers:
        one = SampleStack(((material, length),))
        gd = group_delay(one, we)
        rows.append((material.name, length, gd, 2 * gvd(one, we), group_index(one, we), delay_to_stage(gd)))
        report.append({"material": material.name, "thickness_mm": length, "group_delay_fs": gd,
                       "stage_shift_um": delay_to_stage(gd)})
    total = group_delay(setup.sample, we) if setup.sample else 0.0
    write_rows(out, header, rows)
    return {"layers": report,
            "evaluation_wavelength_nm": omega_to_wavelength(we),
            "laser_wavelength_nm": omega_to_wavelength(w0),
            "total_group_delay_fs": total,
            "total_gdd_fs2": 2 * gvd(setup.sample, we) if setup.sample else 0.0,
            "stage_shift_um": delay_to_stage(total),
            "stage_shift_at_laser_centre_um": delay_to_stage(group_delay(setup.sample, w0)) if setup.sample else 0.0}


RUNNERS = {
    "cpi-dip": (run_cpi_dip, "trace", "filtered SFG power vs stage position, Gaussian dip fit"),
    "spectrum-map": (run_spectrum_map, "map", "SFG spectrum vs stage position, branch separation slope"),
    "wli": (run_wli, "trace", "white-light fringes, Hilbert envelope width and centre"),
    "hom-dip": (run_hom_dip, "trace", "HOM coincidence dip for the same sample and spectrum"),
    "loss-sweep": (run_loss_sweep, "sweep", "CPI and WLI visibility vs sample-arm transmission"),
    "group-delay": (run_group_delay, None, "per-layer group delay, GDD and stage shift"),
}


def run_fit(args) -> dict:
    trace = read_trace(args.input, "wli-fringes" if args.fringes else "cpi-dip")
    if args.fringes:
        env = hilbert_envelope(trace)
        fwhm_um, centre = envelope_fwhm_centre(env, trace.stage_positions)
        return {"envelope_fwhm_um": fwhm_um, "envelope_fwhm_fs": float(stage_to_delay(fwhm_um)),
                "centre_um": centre, "fringe_visibility": fringe_visibility(trace)}
    if args.bias:
        trace = subtract_bias(trace, args.bias)
    summary = _fit_summary(trace)
    if trace.notes:
        summary["notes"] = list(trace.notes)
    return summary


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cpilab", description="Chirped-pulse interferometry simulator.")
    p.add_argument("--version", action="version", version=f"cpilab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, _, desc) in RUNNERS.items():
        s = sub.add_parser(name, help=desc)
        s.add_argument("--config", required=True,
                       help="config file, or the name of a shipped config such as lab_dip.cfg")
        s.add_argument("--out", help=f"output CSV (default {name}.csv)")
        s.add_argument("--threads", type=int, default=1, help="worker threads for delay scans")
        s.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script next to the CSV")
    f = sub.add_parser("fit", help="fit an existing trace CSV")
    f.add_argument("--input", required=True)
    f.add_argument("--fringes", action="store_true", help="treat the trace as white-light fringes")
    f.add_argument("--bias", type=float, default=0.0, help="detector dark offset to subtract first")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fit":
            summary = run_fit(args)
        else:
            if args.threads < 1:
                raise ConfigError("--threads must be >= 1")
            cfg = load_config(args.config)
            fn, kind, _ = RUNNERS[args.command]
            out = args.out or f"{args.command}.csv"
            summary = fn(cfg, out, args.threads)
            summary = {"command": args.command, "config": cfg.source, "csv": out, **summary}
            if args.gnuplot and kind:
                summary["gnuplot"] = write_gnuplot(out, kind)
    except (ConfigError, GridError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
