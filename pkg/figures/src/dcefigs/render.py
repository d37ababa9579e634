"""Render figure jobs from dceslab CSV outputs.

Two kinds: ``density-map`` (reflectivity or integrand matrices, log
intensity, optional surface-mode overlay curves) and
``spectrum-overlay`` (emission-rate curves on a log axis).  Each image
gets a ``<image>.json`` cross-check recording, per plotted spectrum,
that the brightest rendered point is the CSV argmax row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import LogNorm  # noqa: E402

from .csvio import (  # noqa: E402
    InputError,
    omega0_from_sidecar,
    read_curve,
    read_matrix,
    read_spectrum,
)

C_LIGHT = 299_792_458.0

PLOT_KINDS = ("density-map", "spectrum-overlay")


@dataclass
class Panel:
    csv: str
    title: str = ""
    overlay_csv: str | None = None


@dataclass
class Curve:
    csv: str
    label: str = ""
    style: str = "solid"


@dataclass
class PlotJob:
    kind: str
    output: str
    panels: list[Panel] = field(default_factory=list)
    curves: list[Curve] = field(default_factory=list)
    x_axis: str = "omega0_c"  # wavenumber axis: "omega0_c" or "rad_per_m"
    y_axis: str = "omega0"  # frequency axis: "omega0" or "rad_per_s"
    log_x: bool = True
    log_intensity: bool = True
    log_y: bool = True  # rate axis of spectrum overlays
    title: str = ""

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise InputError(f"job kind must be one of {PLOT_KINDS}")
        if self.kind == "density-map" and not self.panels:
            raise InputError("density-map job needs at least one panel")
        if self.kind == "spectrum-overlay" and not self.curves:
            raise InputError("spectrum-overlay job needs at least one curve")
        if self.x_axis not in ("omega0_c", "rad_per_m"):
            raise InputError("x_axis must be 'omega0_c' or 'rad_per_m'")
        if self.y_axis not in ("omega0", "rad_per_s"):
            raise InputError("y_axis must be 'omega0' or 'rad_per_s'")


def load_job(path) -> PlotJob:
    path = Path(path)
    if not path.exists():
        raise InputError(f"job file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: job must be a JSON object")
    try:
        panels = [Panel(**p) for p in data.pop("panels", [])]
        curves = [Curve(**c) for c in data.pop("curves", [])]
        job = PlotJob(panels=panels, curves=curves, **data)
    except TypeError as exc:
        raise InputError(f"{path}: bad job field: {exc}") from exc
    # interpret relative CSV paths against the job file location
    base = path.parent
    for p in job.panels:
        p.csv = str(base / p.csv) if not Path(p.csv).is_absolute() else p.csv
        if p.overlay_csv and not Path(p.overlay_csv).is_absolute():
            p.overlay_csv = str(base / p.overlay_csv)
    for c in job.curves:
        c.csv = str(base / c.csv) if not Path(c.csv).is_absolute() else c.csv
    if not Path(job.output).is_absolute():
        job.output = str(base / job.output)
    return job


def _panel_grid(n):
    if n <= 1:
        return 1, 1
    if n == 2:
        return 1, 2
    return 2, 2 if n <= 4 else -(-n // 2)


def _draw_density(ax, panel: Panel, job: PlotJob):
    data = read_matrix(panel.csv)
    x = data.cols
    y = data.rows
    if job.x_axis == "omega0_c" or job.y_axis == "omega0":
        omega0 = omega0_from_sidecar(data, panel.csv)
    if job.x_axis == "omega0_c":
        x = x * C_LIGHT / omega0
        ax.set_xlabel("q c / $\\omega_0$")
    else:
        ax.set_xlabel("q [rad/m]")
    if job.y_axis == "omega0":
        y = y / omega0
        ax.set_ylabel("$\\omega/\\omega_0$")
    else:
        ax.set_ylabel("$\\omega$ [rad/s]")

    vals = data.values
    vmax = vals.max()
    if job.log_intensity and vmax > 0:
        positive = vals[vals > 0]
        vmin = max(positive.min(), vmax * 1e-8)
        norm = LogNorm(vmin=vmin, vmax=vmax)
        shown = np.clip(vals, vmin, None)
    else:
        norm = None  # uniform or linear map
        shown = vals
    mesh = ax.pcolormesh(x, y, shown, norm=norm, cmap="inferno",
                         shading="auto")
    if job.log_x:
        ax.set_xscale("log")
    if panel.overlay_csv:
        curve = read_curve(panel.overlay_csv)
        cx, cy = curve.x, curve.y
        if job.x_axis == "omega0_c":
            cx = cx * C_LIGHT / omega0
        if job.y_axis == "omega0":
            cy = cy / omega0
        keep = np.isfinite(cy)
        ax.plot(cx[keep], cy[keep], "--", color="w", lw=1.2)
        ax.set_xlim(x.min(), x.max())
        ax.set_ylim(y.min(), y.max())
    if panel.title:
        ax.set_title(panel.title)
    return mesh


def _render_density(job: PlotJob) -> dict:
    nrows, ncols = _panel_grid(len(job.panels))
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(5.2 * ncols, 4.0 * nrows), squeeze=False
    )
    flat = axes.ravel()
    meshes = []
    for ax, panel in zip(flat, job.panels):
        meshes.append(_draw_density(ax, panel, job))
    for ax in flat[len(job.panels):]:
        ax.axis("off")
    for ax, mesh in zip(flat, meshes):
        fig.colorbar(mesh, ax=ax)
    if job.title:
        fig.suptitle(job.title)
    fig.tight_layout()
    fig.savefig(job.output, dpi=150)
    plt.close(fig)
    return {
        "kind": job.kind,
        "panels": [{"csv": p.csv} for p in job.panels],
    }


def _render_overlay(job: PlotJob) -> dict:
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    checks = []
    for curve in job.curves:
        data = read_spectrum(curve.csv)
        style = "--" if curve.style == "dashed" else "-"
        label = curve.label or Path(curve.csv).stem
        ax.plot(data.x, data.rate, style, label=label)
        # argmax of the rendered arrays against the CSV argmax row
        rendered_argmax = int(np.argmax(data.rate))
        checks.append({
            "csv": curve.csv,
            "label": label,
            "csv_argmax_row": data.argmax_row,
            "rendered_argmax_index": rendered_argmax,
            "argmax_x": float(data.x[rendered_argmax]),
            "argmax_rate": float(data.rate[rendered_argmax]),
            "matches_csv": rendered_argmax == data.argmax_row,
        })
    if job.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("$\\omega/\\omega_0$")
    ax.set_ylabel("normalized emission rate")
    ax.legend()
    if job.title:
        ax.set_title(job.title)
    fig.tight_layout()
    fig.savefig(job.output, dpi=150)
    plt.close(fig)
    return {"kind": job.kind, "spectra": checks}


def render(job: PlotJob) -> Path:
    """Render the job; writes the image plus an argmax cross-check JSON."""
    out = Path(job.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    if job.kind == "density-map":
        meta = _render_density(job)
    else:
        meta = _render_overlay(job)
    meta_path = out.parent / (out.name + ".json")
    with open(meta_path, "w", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out
