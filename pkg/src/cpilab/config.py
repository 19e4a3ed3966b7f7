"""Experiment configuration files.

INI format, one section per part of the apparatus.  Every physical quantity
carries its unit in the key name; unknown sections and keys are rejected so a
misspelt key can never fall back silently to a default.

    [laser]       centre_wavelength_nm, pulse_duration_fs
    [chirp]       chirped_duration_fs, chirped_bandwidth_nm,
                  antichirped_duration_fs, antichirped_bandwidth_nm,
                  chirp_fs2, scale, sfg_centre_nm, overlap_offset_fs
    [sample]      layers_mm = "calcite 80.60, bk7 28.93", materials_file
    [filter]      centre_wavelength_nm, fwhm_nm, shape, sfg_acceptance_nm
    [loss]        transmission, sweep_transmissions
    [detector]    background, background_fraction, bias
    [scan]        centre_um ("auto" = predicted dip), half_width_um, step_um,
                  wli_centre_um, wli_half_width_um, wli_step_um,
                  map_half_width_um, map_step_um, map_window_nm
    [grid]        n_points
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass
from importlib import resources

from .errors import ConfigError
from .experiment import Detector, Laser, OpticalSetup, Scan, build_setup
from .optics import VACUUM, SampleStack, group_delay, load_materials, lookup_material
from .units import delay_to_stage

AUTO = "auto"

SCHEMA: dict[str, dict[str, str]] = {
    # key -> kind: float, int, str, floats, auto (float or "auto")
    "laser": {"centre_wavelength_nm": "float", "pulse_duration_fs": "float"},
    "chirp": {
        "chirped_duration_fs": "float", "chirped_bandwidth_nm": "float",
        "antichirped_duration_fs": "float", "antichirped_bandwidth_nm": "float",
        "chirp_fs2": "float", "scale": "float", "sfg_centre_nm": "float",
        "overlap_offset_fs": "float",
    },
    "sample": {"layers_mm": "str", "materials_file": "str"},
    "filter": {"centre_wavelength_nm": "float", "fwhm_nm": "float", "shape": "str",
               "sfg_acceptance_nm": "float"},
    "loss": {"transmission": "float", "sweep_transmissions": "floats"},
    "detector": {"background": "float", "background_fraction": "float", "bias": "float"},
    "scan": {
        "centre_um": "auto", "half_width_um": "float", "step_um": "float",
        "wli_centre_um": "auto", "wli_half_width_um": "float", "wli_step_um": "float",
        "map_half_width_um": "float", "map_step_um": "float", "map_window_nm": "float",
    },
    "grid": {"n_points": "int"},
}

DEFAULT_DIP_HALF_WIDTH_UM = 60.0
DEFAULT_DIP_STEP_UM = 1.0
DEFAULT_WLI_HALF_WIDTH_UM = 80.0
DEFAULT_MAP_HALF_WIDTH_UM = 600.0
DEFAULT_MAP_STEP_UM = 50.0
DEFAULT_MAP_WINDOW_NM = 1.5
DEFAULT_SWEEP = (1.0, 0.5, 0.1, 0.01)


@dataclass(frozen=True)
class ExperimentConfig:
    setup: OpticalSetup
    dip_scan: Scan
    wli_scan: Scan
    map_scan: Scan
    map_window_nm: float
    sweep_transmissions: tuple[float, ...]
    source: str = ""


def _convert(section: str, key: str, kind: str, raw: str):
    raw = raw.strip()
    try:
        if kind == "float":
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind == "int":
            return int(raw)
        if kind == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == "auto":
            return AUTO if raw.lower() == AUTO else float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} as {kind}") from None


def read_sections(text: str, source: str = "<string>") -> dict[str, dict]:
    """Parse and type-check a config text against SCHEMA."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {source}: {exc}") from None
    out: dict[str, dict] = {}
    for name in parser.sections():
        if name not in SCHEMA:
            raise ConfigError(f"unknown section [{name}] in {source}")
        allowed = SCHEMA[name]
        values = {}
        for key, raw in parser[name].items():
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in [{name}] of {source}; allowed: {sorted(allowed)}")
            if raw.strip() == "":
                continue
            values[key] = _convert(name, key, allowed[key], raw)
        out[name] = values
    return out


def parse_layers(text: str, materials) -> SampleStack:
    """'calcite 80.60, bk7 28.93' -> SampleStack."""
    layers = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split()
        if len(parts) != 2:
            raise ConfigError(f"layer {item!r} should read '<material> <thickness_mm>'")
        try:
            thickness = float(parts[1])
        except ValueError:
            raise ConfigError(f"layer {item!r}: bad thickness") from None
        layers.append((lookup_material(materials, parts[0]), thickness))
    return SampleStack(tuple(layers)) if layers else VACUUM


def build_config(sections: dict[str, dict], base_dir: str | None = None, source: str = "") -> ExperimentConfig:
    laser_s = sections.get("laser", {})
    chirp_s = sections.get("chirp", {})
    sample_s = sections.get("sample", {})
    filt_s = sections.get("filter", {})
    loss_s = sections.get("loss", {})
    det_s = sections.get("detector", {})
    scan_s = sections.get("scan", {})
    grid_s = sections.get("grid", {})

    laser = Laser(laser_s.get("centre_wavelength_nm", 790.0), laser_s.get("pulse_duration_fs", 110.0))

    sample = VACUUM
    if sample_s.get("layers_mm"):
        path = sample_s.get("materials_file")
        if path and base_dir and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        sample = parse_layers(sample_s["layers_mm"], load_materials(path))

    eta = loss_s.get("transmission", 1.0)
    if not 0.0 <= eta <= 1.0:
        raise ConfigError(f"[loss] transmission {eta} outside [0, 1]")
    sweep = loss_s.get("sweep_transmissions", DEFAULT_SWEEP)
    if not sweep or any(not 0.0 < v <= 1.0 for v in sweep):
        raise ConfigError(f"[loss] sweep_transmissions must lie in (0, 1]: {sweep}")

    kwargs = dict(
        laser=laser,
        chirped_duration_fs=chirp_s.get("chirped_duration_fs", 51200.0),
        chirped_bandwidth_nm=chirp_s.get("chirped_bandwidth_nm", 10.0),
        antichirped_duration_fs=chirp_s.get("antichirped_duration_fs", 45000.0),
        antichirped_bandwidth_nm=chirp_s.get("antichirped_bandwidth_nm", 9.0),
        chirp_fs2=chirp_s.get("chirp_fs2"),
        chirp_scale=chirp_s.get("scale", 1.0),
        overlap_offset_fs=chirp_s.get("overlap_offset_fs"),
        sfg_centre_nm=chirp_s.get("sfg_centre_nm"),
        filter_centre_nm=filt_s.get("centre_wavelength_nm"),
        filter_fwhm_nm=filt_s.get("fwhm_nm", 0.4),
        filter_shape=filt_s.get("shape", "gaussian"),
        sfg_acceptance_nm=filt_s.get("sfg_acceptance_nm"),
        sample=sample,
        sample_transmission=eta,
        detector=Detector(det_s.get("background", 0.0), det_s.get("background_fraction", 0.0),
                          det_s.get("bias", 0.0)),
        n_points=grid_s.get("n_points"),
    )
    for key in ("chirped_duration_fs", "chirped_bandwidth_nm", "antichirped_duration_fs",
                "antichirped_bandwidth_nm", "chirp_scale", "filter_fwhm_nm"):
        if not kwargs[key] > 0:
            raise ConfigError(f"{key} must be positive, got {kwargs[key]}")
    try:
        setup = build_setup(**kwargs)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    dip_centre = scan_s.get("centre_um", AUTO)
    if dip_centre == AUTO:
        dip_centre = delay_to_stage(group_delay(sample, setup.effective_centre)) if sample else 0.0
    wli_centre = scan_s.get("wli_centre_um", AUTO)
    if wli_centre == AUTO:
        wli_centre = delay_to_stage(group_delay(sample, setup.omega0)) if sample else 0.0
    wli_step = scan_s.get("wli_step_um", laser.centre_nm / 1000 / 20)
    if wli_step > laser.centre_nm / 1000 / 16:
        raise ConfigError(f"[scan] wli_step_um {wli_step} exceeds lambda/16 (8 samples per fringe)")

    return ExperimentConfig(
        setup=setup,
        dip_scan=Scan.centred(dip_centre, scan_s.get("half_width_um", DEFAULT_DIP_HALF_WIDTH_UM),
                              scan_s.get("step_um", DEFAULT_DIP_STEP_UM)),
        wli_scan=Scan.centred(wli_centre, scan_s.get("wli_half_width_um", DEFAULT_WLI_HALF_WIDTH_UM), wli_step),
        map_scan=Scan.centred(dip_centre, scan_s.get("map_half_width_um", DEFAULT_MAP_HALF_WIDTH_UM),
                              scan_s.get("map_step_um", DEFAULT_MAP_STEP_UM)),
        map_window_nm=scan_s.get("map_window_nm", DEFAULT_MAP_WINDOW_NM),
        sweep_transmissions=tuple(sweep),
        source=source,
    )


def parse_config(path) -> ExperimentConfig:
    """Read a config file into an ExperimentConfig."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return build_config(read_sections(text, str(path)), os.path.dirname(os.path.abspath(path)), str(path))


def parse_config_string(text: str) -> ExperimentConfig:
    return build_config(read_sections(text))


def shipped_config(name: str) -> str:
    """Filesystem path of a config shipped with the package, e.g. 'lab_dip.cfg'."""
    path = resources.files("cpilab") / "configs" / name
    if not path.is_file():
        raise ConfigError(f"no shipped config named {name!r}")
    return str(path)
