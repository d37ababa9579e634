"""Readers for the dceslab CSV formats.

The plotting layer owns no physics: everything it draws comes from these
files and their JSON sidecars.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class InputError(ValueError):
    """Missing, ragged, or wrongly-shaped input file."""


@dataclass
class MatrixData:
    """Density-map CSV: header row of q values, first column of omega."""

    row_label: str
    rows: np.ndarray  # frequencies [rad/s]
    cols: np.ndarray  # wavenumbers [rad/m]
    values: np.ndarray
    sidecar: dict | None


@dataclass
class SpectrumData:
    """Spectrum CSV with omega_over_omega0 and rate columns."""

    x: np.ndarray  # omega / omega_0
    rate: np.ndarray
    argmax_row: int
    sidecar: dict | None


@dataclass
class CurveData:
    """Two-column curve (e.g. surface-mode frequency vs wavenumber)."""

    x: np.ndarray
    y: np.ndarray


def _read_rows(path: Path) -> list[list[str]]:
    if not path.exists():
        raise InputError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if len(rows) < 2:
        raise InputError(f"{path}: no data rows")
    return rows


def _sidecar(path: Path) -> dict | None:
    side = path.with_suffix(".json")
    if side.exists():
        return json.loads(side.read_text())
    return None


def _parse_float(path, text, where):
    try:
        return float(text)
    except ValueError as exc:
        raise InputError(f"{path}: bad number at {where}: {text!r}") from exc


def read_matrix(path) -> MatrixData:
    path = Path(path)
    rows = _read_rows(path)
    header = rows[0]
    width = len(header)
    if width < 2:
        raise InputError(f"{path}: matrix needs at least one q column")
    cols = np.array(
        [_parse_float(path, v, "header") for v in header[1:]]
    )
    freq = []
    values = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise InputError(
                f"{path}: ragged row {i} ({len(row)} fields, expected {width})"
            )
        freq.append(_parse_float(path, row[0], f"row {i}"))
        values.append([_parse_float(path, v, f"row {i}") for v in row[1:]])
    return MatrixData(
        row_label=header[0],
        rows=np.array(freq),
        cols=cols,
        values=np.array(values),
        sidecar=_sidecar(path),
    )


def read_spectrum(path) -> SpectrumData:
    path = Path(path)
    rows = _read_rows(path)
    header = rows[0]
    try:
        ix = header.index("omega_over_omega0")
        iy = header.index("rate")
    except ValueError as exc:
        raise InputError(
            f"{path}: not a spectrum CSV (needs omega_over_omega0, rate)"
        ) from exc
    x, y = [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"{path}: ragged row {i}")
        x.append(_parse_float(path, row[ix], f"row {i}"))
        y.append(_parse_float(path, row[iy], f"row {i}"))
    y_arr = np.array(y)
    return SpectrumData(
        x=np.array(x),
        rate=y_arr,
        argmax_row=int(np.argmax(y_arr)),
        sidecar=_sidecar(path),
    )


def read_curve(path) -> CurveData:
    path = Path(path)
    rows = _read_rows(path)
    x, y = [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) < 2:
            raise InputError(f"{path}: ragged row {i}")
        x.append(_parse_float(path, row[0], f"row {i}"))
        y.append(_parse_float(path, row[1], f"row {i}"))
    return CurveData(x=np.array(x), y=np.array(y))


def omega0_from_sidecar(data, path) -> float:
    if data.sidecar is None:
        raise InputError(
            f"{path}: normalized axes need the JSON sidecar (omega_0)"
        )
    try:
        return float(data.sidecar["config"]["material"]["omega_0"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: sidecar lacks material omega_0") from exc
