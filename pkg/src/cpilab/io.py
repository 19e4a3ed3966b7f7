"""CSV output and input.

Floats are written with their shortest round-trip representation, so a trace
read back is bit-identical to the one written and repeated runs give
byte-identical files.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .errors import ConfigError
from .experiment import Interferogram, SpectrumMap

TRACE_HEADER = ("stage_position_um", "delay_fs", "signal")
MAP_HEADER = ("stage_position_um", "wavelength_nm", "power")
SWEEP_HEADER = ("transmission", "cpi_visibility", "wli_visibility", "wli_expected")


def _fmt(v) -> str:
    return v if isinstance(v, str) else repr(float(v))


def write_rows(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_trace(path, trace: Interferogram) -> None:
    write_rows(path, TRACE_HEADER, zip(trace.stage_positions, trace.delays, trace.signal))


def write_map(path, smap: SpectrumMap) -> None:
    def rows():
        for x, row in zip(smap.stage_positions, smap.power):
            for lam, p in zip(smap.wavelengths, row):
                yield x, lam, p

    write_rows(path, MAP_HEADER, rows())


def read_columns(path, header) -> np.ndarray:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            got = tuple(next(reader, ()))
            if got != tuple(header):
                raise ConfigError(f"{path}: expected header {','.join(header)}, got {','.join(got)}")
            data = [[float(v) for v in row] for row in reader if row]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{path}: bad number ({exc})") from None
    return np.array(data, dtype=float).reshape(-1, len(header))


def read_trace(path, kind: str = "cpi-dip") -> Interferogram:
    a = read_columns(path, TRACE_HEADER)
    return Interferogram(a[:, 0], a[:, 1], a[:, 2], kind)


def gnuplot_script(csv_path, kind: str) -> str:
    name = os.path.basename(csv_path)
    if kind == "map":
        body = ("set xlabel 'stage position (um)'\nset ylabel 'wavelength (nm)'\n"
                "set view map\n"
                f"splot '{name}' using 1:2:3 with points pointtype 5 pointsize 0.5 palette notitle\n")
    elif kind == "sweep":
        body = ("set xlabel 'sample-arm transmission'\nset ylabel 'visibility'\nset logscale x\n"
                f"plot '{name}' using 1:2 with linespoints title 'CPI', \\\n"
                f"     '{name}' using 1:3 with linespoints title 'WLI', \\\n"
                f"     '{name}' using 1:4 with lines dashtype 2 title '2 sqrt(eta)/(1+eta)'\n")
    else:
        body = ("set xlabel 'stage position (um)'\nset ylabel 'signal'\n"
                f"plot '{name}' using 1:3 with lines notitle\n")
    return "set datafile separator ','\nset key autotitle columnhead\n" + body


def write_gnuplot(csv_path, kind: str) -> str:
    """Write ``<stem>.gp`` next to the CSV and return its path."""
    path = os.path.splitext(str(csv_path))[0] + ".gp"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(gnuplot_script(csv_path, kind))
    return path
