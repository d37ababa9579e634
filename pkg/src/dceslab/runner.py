"""Scenario execution: produce CSV outputs with JSON sidecars.

Every CSV gets a sidecar of the same basename carrying the full resolved
configuration (enough to re-run the scenario exactly) plus a summary of
the file contents.  Numeric formatting uses shortest round-trip floats,
so repeated runs of one config are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import (
    CutoffStudyParams,
    DecayParams,
    DispersionParams,
    EmissionParams,
    IntegrandMapParams,
    ScenarioConfig,
    to_jsonable,
)
from .emission import (
    EmissionConfig,
    cutoff_study,
    decay_rate_factor,
    emission_spectrum,
    integrand_map,
)
from .slab import dispersion_map, surface_mode_freq


class NumericError(RuntimeError):
    """A scenario produced non-finite output."""


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return repr(float(x))


def _write_rows(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _write_matrix(path: Path, row_label: str, row_values, col_values,
                  matrix) -> None:
    header = [row_label] + [_fmt(q) for q in col_values]
    rows = (
        [row_values[i]] + list(matrix[i]) for i in range(len(row_values))
    )
    _write_rows(path, header, rows)


def _write_sidecar(path: Path, cfg: ScenarioConfig, output: dict) -> None:
    payload = {"config": to_jsonable(cfg), "output": output}
    with open(path.with_suffix(".json"), "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _check_finite(name: str, *arrays) -> None:
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NumericError(f"{name}: non-finite values in output")


def _models(cfg: ScenarioConfig) -> list[str]:
    return ["local", "nonlocal"] if cfg.model == "both" else [cfg.model]


def _material_for(cfg: ScenarioConfig, model: str):
    if model == "local":
        return replace(cfg.material, beta=0.0)
    return cfg.material


def _emission_cfg(cfg: ScenarioConfig, model: str) -> EmissionConfig:
    override = getattr(cfg.params, f"cutoff_{model}", None)
    spec = cfg.quadrature
    if override is not None:
        spec = replace(spec, cutoff_policy=override)
    return EmissionConfig(
        material=_material_for(cfg, model),
        pulse=cfg.pulse,
        geometry=cfg.geometry,
        quadrature=spec,
        model_tag=model,
    )


def _ridge(omega_grid, values) -> np.ndarray:
    """Frequency of maximum response per wavenumber column."""
    return omega_grid[np.argmax(values, axis=0)]


def _run_dispersion(cfg, outdir, echo):
    params: DispersionParams = cfg.params
    w0 = cfg.material.omega_0
    omega = params.omega_grid.build()
    files = []
    ridges: dict[tuple[str, str], np.ndarray] = {}
    for i, q_spec in enumerate(params.q_grids):
        label = q_spec.label or f"q{i}"
        q = q_spec.build()
        for model in _models(cfg):
            mat = _material_for(cfg, model)
            dmap = dispersion_map(mat, cfg.geometry, omega, q)
            _check_finite("dispersion", dmap.values)
            path = outdir / f"dispersion_{model}_{label}.csv"
            _write_matrix(path, "omega_rad_per_s", omega, q, dmap.values)
            ridge = _ridge(omega, dmap.values)
            ridges[(model, label)] = ridge
            _write_sidecar(path, cfg, {
                "file": path.name,
                "kind": "density-map",
                "scenario": "dispersion",
                "model": model,
                "rows": "omega_rad_per_s",
                "cols": "q_rad_per_m",
                "values": "abs_R_p",
                "summary": {
                    "max_value": float(dmap.values.max()),
                    "ridge_omega_over_omega0_at_qmax": float(ridge[-1] / w0),
                },
            })
            echo(
                f"dispersion[{model}/{label}]: max |R_p|="
                f"{dmap.values.max():.4g}, ridge at q_max "
                f"omega/omega_0={ridge[-1] / w0:.4f} -> {path}"
            )
            files.append(path)

            modes = [surface_mode_freq(mat, qi) for qi in q]
            mode_arr = np.array(
                [m if m is not None else np.nan for m in modes]
            )
            mpath = outdir / f"surface_modes_{model}_{label}.csv"
            _write_rows(
                mpath,
                ["q_rad_per_m", "omega_rad_per_s"],
                zip(q, mode_arr),
            )
            _write_sidecar(mpath, cfg, {
                "file": mpath.name,
                "kind": "curve",
                "scenario": "dispersion",
                "model": model,
                "columns": ["q_rad_per_m", "omega_rad_per_s"],
                "summary": {
                    "modes_present": int(np.sum(np.isfinite(mode_arr))),
                },
            })
            files.append(mpath)
        if cfg.model == "both":
            cpath = outdir / f"dispersion_comparison_{label}.csv"
            _write_rows(
                cpath,
                ["q_rad_per_m", "ridge_omega_local", "ridge_omega_nonlocal"],
                zip(q, ridges[("local", label)], ridges[("nonlocal", label)]),
            )
            _write_sidecar(cpath, cfg, {
                "file": cpath.name,
                "kind": "comparison",
                "scenario": "dispersion",
                "columns": [
                    "q_rad_per_m",
                    "ridge_omega_local",
                    "ridge_omega_nonlocal",
                ],
            })
            echo(f"dispersion comparison[{label}] -> {cpath}")
            files.append(cpath)
    return files


def _run_integrand_map(cfg, outdir, echo):
    params: IntegrandMapParams = cfg.params
    w0 = cfg.material.omega_0
    omega_prime = params.omega_prime_grid.build()
    q = params.q_grid.build()
    files = []
    ridges = {}
    for model in _models(cfg):
        ecfg = _emission_cfg(cfg, model)
        imap = integrand_map(ecfg, params.omega_fixed, omega_prime, q)
        _check_finite("integrand-map", imap.values)
        path = outdir / f"integrand_{model}.csv"
        _write_matrix(path, "omega_prime_rad_per_s", omega_prime, q,
                      imap.values)
        ridges[model] = _ridge(omega_prime, imap.values)
        i, j = np.unravel_index(np.argmax(imap.values), imap.values.shape)
        _write_sidecar(path, cfg, {
            "file": path.name,
            "kind": "density-map",
            "scenario": "integrand-map",
            "model": model,
            "rows": "omega_prime_rad_per_s",
            "cols": "q_rad_per_m",
            "values": "pair_integrand",
            "omega_fixed": params.omega_fixed,
            "summary": {
                "max_value": float(imap.values[i, j]),
                "argmax_omega_prime_over_omega0": float(omega_prime[i] / w0),
                "argmax_q_omega0_c": float(
                    q[j] * 299_792_458.0 / w0
                ),
            },
        })
        echo(
            f"integrand-map[{model}]: max={imap.values[i, j]:.4g} at "
            f"omega'/omega_0={omega_prime[i] / w0:.4f}, "
            f"q c/omega_0={q[j] * 299_792_458.0 / w0:.4g} -> {path}"
        )
        files.append(path)
    if cfg.model == "both":
        cpath = outdir / "integrand_comparison.csv"
        _write_rows(
            cpath,
            ["q_rad_per_m", "ridge_omega_prime_local",
             "ridge_omega_prime_nonlocal"],
            zip(q, ridges["local"], ridges["nonlocal"]),
        )
        _write_sidecar(cpath, cfg, {
            "file": cpath.name,
            "kind": "comparison",
            "scenario": "integrand-map",
            "columns": ["q_rad_per_m", "ridge_omega_prime_local",
                        "ridge_omega_prime_nonlocal"],
        })
        echo(f"integrand-map comparison -> {cpath}")
        files.append(cpath)
    return files


def _spectrum_rows(res, w0):
    for i in range(len(res.omega_grid)):
        yield (
            res.omega_grid[i] / w0,
            res.rate[i],
            res.error_estimates[i],
            bool(res.converged_flags[i]),
            res.effective_q_max[i],
        )


def _run_emission(cfg, outdir, echo):
    params: EmissionParams = cfg.params
    w0 = cfg.material.omega_0
    files = []
    results = {}
    for model in _models(cfg):
        ecfg = _emission_cfg(cfg, model)
        grid = params.omega_grid.build(ecfg.material)
        res = emission_spectrum(ecfg, grid)
        _check_finite("emission", res.rate)
        results[model] = res
        path = outdir / f"emission_{model}.csv"
        _write_rows(
            path,
            ["omega_over_omega0", "rate", "error_estimate", "converged",
             "effective_q_max"],
            _spectrum_rows(res, w0),
        )
        i = int(np.argmax(res.rate))
        n_conv = int(np.sum(res.converged_flags))
        _write_sidecar(path, cfg, {
            "file": path.name,
            "kind": "spectrum",
            "scenario": "emission",
            "model": model,
            "columns": ["omega_over_omega0", "rate", "error_estimate",
                        "converged", "effective_q_max"],
            "summary": {
                "peak_omega_over_omega0": float(res.omega_grid[i] / w0),
                "peak_rate": float(res.rate[i]),
                "argmax_row": i,
                "converged_points": n_conv,
                "total_points": len(grid),
                "any_q_divergent": bool(res.q_divergent_flags.any()),
            },
        })
        echo(
            f"emission[{model}]: peak at omega/omega_0="
            f"{res.omega_grid[i] / w0:.4f}, max rate={res.rate[i]:.4e}, "
            f"converged {n_conv}/{len(grid)} -> {path}"
        )
        files.append(path)
    if cfg.model == "both":
        rl, rn = results["local"], results["nonlocal"]
        cpath = outdir / "emission_comparison.csv"
        if len(rl.omega_grid) == len(rn.omega_grid) and np.allclose(
            rl.omega_grid, rn.omega_grid
        ):
            _write_rows(
                cpath,
                ["omega_over_omega0", "rate_local", "rate_nonlocal"],
                zip(rl.omega_grid / w0, rl.rate, rn.rate),
            )
            _write_sidecar(cpath, cfg, {
                "file": cpath.name,
                "kind": "comparison",
                "scenario": "emission",
                "columns": ["omega_over_omega0", "rate_local",
                            "rate_nonlocal"],
            })
            echo(f"emission comparison -> {cpath}")
            files.append(cpath)
    return files


def _run_decay(cfg, outdir, echo):
    params: DecayParams = cfg.params
    w0 = cfg.material.omega_0
    files = []
    values = {}
    for model in _models(cfg):
        ecfg = _emission_cfg(cfg, model)
        value, point = decay_rate_factor(ecfg, params.omega_a)
        _check_finite("decay", [value])
        values[model] = (value, point)
        path = outdir / f"decay_{model}.csv"
        _write_rows(
            path,
            ["omega_a_over_omega0", "enhancement_factor", "error_estimate",
             "converged", "effective_q_max"],
            [(params.omega_a / w0, value,
              point.error_estimate * cfg.pulse.T, point.converged,
              point.effective_q_max)],
        )
        _write_sidecar(path, cfg, {
            "file": path.name,
            "kind": "table",
            "scenario": "decay",
            "model": model,
            "columns": ["omega_a_over_omega0", "enhancement_factor",
                        "error_estimate", "converged", "effective_q_max"],
            "summary": {
                "enhancement_factor": float(value),
                "converged": bool(point.converged),
                "q_divergent": bool(point.q_divergent),
            },
        })
        echo(
            f"decay[{model}]: factor={value:.4e} at omega_a/omega_0="
            f"{params.omega_a / w0:.4f}, converged={point.converged} -> {path}"
        )
        files.append(path)
    if cfg.model == "both":
        cpath = outdir / "decay_comparison.csv"
        _write_rows(
            cpath,
            ["omega_a_over_omega0", "factor_local", "factor_nonlocal"],
            [(params.omega_a / w0, values["local"][0],
              values["nonlocal"][0])],
        )
        _write_sidecar(cpath, cfg, {
            "file": cpath.name,
            "kind": "comparison",
            "scenario": "decay",
            "columns": ["omega_a_over_omega0", "factor_local",
                        "factor_nonlocal"],
        })
        echo(f"decay comparison -> {cpath}")
        files.append(cpath)
    return files


def _run_cutoff_study(cfg, outdir, echo):
    params: CutoffStudyParams = cfg.params
    w0 = cfg.material.omega_0
    files = []
    tables = {}
    for model in _models(cfg):
        ecfg = _emission_cfg(cfg, model)
        rows = cutoff_study(ecfg, params.omega, params.cutoffs)
        _check_finite("cutoff-study", [r.rate for r in rows])
        tables[model] = rows
        path = outdir / f"cutoff_study_{model}.csv"
        _write_rows(
            path,
            ["q_c_rad_per_m", "rate", "error_estimate", "converged"],
            ((r.q_c, r.rate, r.error_estimate, r.converged) for r in rows),
        )
        growth = (
            rows[-1].rate / rows[0].rate if rows[0].rate > 0 else float("nan")
        )
        _write_sidecar(path, cfg, {
            "file": path.name,
            "kind": "table",
            "scenario": "cutoff-study",
            "model": model,
            "columns": ["q_c_rad_per_m", "rate", "error_estimate",
                        "converged"],
            "summary": {
                "omega_over_omega0": params.omega / w0,
                "rate_growth_first_to_last": float(growth),
            },
        })
        echo(
            f"cutoff-study[{model}]: rate x{growth:.3g} from first to last "
            f"cutoff -> {path}"
        )
        files.append(path)
    if cfg.model == "both":
        cpath = outdir / "cutoff_study_comparison.csv"
        _write_rows(
            cpath,
            ["q_c_rad_per_m", "rate_local", "rate_nonlocal"],
            ((ql.q_c, ql.rate, qn.rate)
             for ql, qn in zip(tables["local"], tables["nonlocal"])),
        )
        _write_sidecar(cpath, cfg, {
            "file": cpath.name,
            "kind": "comparison",
            "scenario": "cutoff-study",
            "columns": ["q_c_rad_per_m", "rate_local", "rate_nonlocal"],
        })
        echo(f"cutoff-study comparison -> {cpath}")
        files.append(cpath)
    return files


_RUNNERS = {
    "dispersion": _run_dispersion,
    "integrand-map": _run_integrand_map,
    "emission": _run_emission,
    "decay": _run_decay,
    "cutoff-study": _run_cutoff_study,
}


def run_scenario(cfg: ScenarioConfig, echo=print) -> list[Path]:
    """Execute the configured scenario; returns the files written.

    Divergence of a wavenumber integral is recorded in the outputs, not
    raised: the caller still gets files and exit code 0.
    """
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[cfg.scenario](cfg, outdir, echo)
