"""Scenario configuration: strict JSON parsing, validation, serialization.

Config files are plain JSON.  Frequencies may be given in rad/s or as
multiples of the material resonance through ``*_over_omega0`` keys;
wavenumbers in rad/m or in units of omega_0/c through ``*_omega0_c``
keys; lengths in m or ``*_nm``; times in s or ``*_fs``.  Unknown keys are
rejected so that typos fail loudly.  ``to_jsonable`` emits the canonical
SI form, and ``parse_config(serialize(cfg)) == cfg`` holds exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .emission import default_omega_grid
from .materials import SIC_BETA, LorentzMaterial, ModulationPulse
from .quadrature import (
    AdaptiveConverged,
    HardCutoff,
    QuadratureSpec,
    policy_to_jsonable,
)
from .slab import SlabGeometry

SCENARIOS = ("dispersion", "integrand-map", "emission", "decay", "cutoff-study")
MODELS = ("local", "nonlocal", "both")
GRID_SPACINGS = ("linear", "log", "peaks")


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""


@dataclass(frozen=True)
class GridSpec:
    """Axis description; values are stored in SI after parsing."""

    lo: float
    hi: float
    n: int
    spacing: str = "linear"
    label: str = ""

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise ConfigError("grid requires 0 < min < max")
        if self.n < 2:
            raise ConfigError("grid requires n >= 2")
        if self.spacing not in GRID_SPACINGS:
            raise ConfigError(f"grid spacing must be one of {GRID_SPACINGS}")

    def build(self, material: LorentzMaterial | None = None) -> np.ndarray:
        if self.spacing == "linear":
            return np.linspace(self.lo, self.hi, self.n)
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.n)
        if material is None:
            raise ConfigError("'peaks' spacing needs a material")
        return default_omega_grid(
            material,
            n=self.n,
            lo_over_omega0=self.lo / material.omega_0,
            hi_over_omega0=self.hi / material.omega_0,
        )


CutoffPolicy = Union[HardCutoff, AdaptiveConverged]


@dataclass(frozen=True)
class DispersionParams:
    omega_grid: GridSpec
    q_grids: tuple[GridSpec, ...]


@dataclass(frozen=True)
class IntegrandMapParams:
    omega_fixed: float
    omega_prime_grid: GridSpec
    q_grid: GridSpec


@dataclass(frozen=True)
class EmissionParams:
    omega_grid: GridSpec
    cutoff_local: CutoffPolicy | None = None
    cutoff_nonlocal: CutoffPolicy | None = None


@dataclass(frozen=True)
class DecayParams:
    omega_a: float
    cutoff_local: CutoffPolicy | None = None
    cutoff_nonlocal: CutoffPolicy | None = None


@dataclass(frozen=True)
class CutoffStudyParams:
    omega: float
    cutoffs: tuple[float, ...]


ScenarioParams = Union[
    DispersionParams,
    IntegrandMapParams,
    EmissionParams,
    DecayParams,
    CutoffStudyParams,
]


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    model: str
    output_dir: str
    material: LorentzMaterial
    pulse: ModulationPulse | None
    geometry: SlabGeometry
    quadrature: QuadratureSpec
    params: ScenarioParams

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}")
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        if self.model != "local" and self.material.beta == 0:
            raise ConfigError("nonlocal model requires material.beta > 0")
        if self.scenario != "dispersion" and self.pulse is None:
            raise ConfigError(f"scenario '{self.scenario}' requires a pulse block")


class _Block:
    """One JSON object being consumed key by key; leftovers are errors."""

    def __init__(self, data: dict, ctx: str):
        if not isinstance(data, dict):
            raise ConfigError(f"{ctx} must be a JSON object")
        self.data = dict(data)
        self.ctx = ctx

    def take(self, key, default=..., required=False):
        if key in self.data:
            return self.data.pop(key)
        if required:
            raise ConfigError(f"{self.ctx}.{key} required")
        return None if default is ... else default

    def has(self, key) -> bool:
        return key in self.data

    def finish(self):
        if self.data:
            key = sorted(self.data)[0]
            raise ConfigError(f"unknown key {self.ctx}.{key}")


def _number(value, ctx):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{ctx} must be a number")
    return float(value)


def _alt_value(block: _Block, key: str, scale_key: str, scale: float,
               default=..., required=False):
    """Value given directly or through a scaled alternative key."""
    if block.has(key) and block.has(scale_key):
        raise ConfigError(f"{block.ctx}: give only one of {key}/{scale_key}")
    if block.has(scale_key):
        return _number(block.take(scale_key), f"{block.ctx}.{scale_key}") * scale
    if block.has(key):
        return _number(block.take(key), f"{block.ctx}.{key}")
    if required:
        raise ConfigError(f"{block.ctx}.{key} required")
    return None if default is ... else default


def _parse_material(data: dict) -> LorentzMaterial:
    b = _Block(data, "material")
    kwargs = {}
    for key in ("omega_p", "omega_0", "gamma", "eps_inf"):
        kwargs[key] = _number(b.take(key, required=True), f"material.{key}")
    beta = b.take("beta", default=SIC_BETA)
    kwargs["beta"] = _number(beta, "material.beta")
    b.finish()
    try:
        return LorentzMaterial(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"material: {exc}") from exc


def _parse_pulse(data: dict, omega_0: float) -> ModulationPulse:
    b = _Block(data, "pulse")
    delta = _number(b.take("delta_omega", required=True), "pulse.delta_omega")
    Omega = _alt_value(b, "Omega", "Omega_over_omega0", omega_0, required=True)
    T = _alt_value(b, "T", "T_fs", 1e-15, required=True)
    b.finish()
    try:
        return ModulationPulse(delta_omega=delta, Omega=Omega, T=T)
    except ValueError as exc:
        raise ConfigError(f"pulse: {exc}") from exc


def _parse_geometry(data: dict) -> SlabGeometry:
    b = _Block(data, "geometry")
    d_s = _alt_value(b, "d_s", "d_s_nm", 1e-9, required=True)
    d = _alt_value(b, "d", "d_nm", 1e-9, default=None)
    b.finish()
    if d is None:
        d = 0.1 * d_s  # thin modulated layer by default
    try:
        return SlabGeometry(d_s=d_s, d=d)
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from exc


def _parse_cutoff(data: dict, ctx: str, q_unit: float) -> CutoffPolicy:
    b = _Block(data, ctx)
    policy = b.take("policy", required=True)
    try:
        if policy == "hard":
            q_c = _alt_value(b, "q_c", "q_c_omega0_c", q_unit, required=True)
            b.finish()
            return HardCutoff(q_c=q_c)
        if policy == "adaptive":
            factor = _number(b.take("window_factor", default=2.0),
                             f"{ctx}.window_factor")
            rel = _number(b.take("rel_change", default=1e-3),
                          f"{ctx}.rel_change")
            b.finish()
            return AdaptiveConverged(window_factor=factor, rel_change=rel)
    except ValueError as exc:
        raise ConfigError(f"{ctx}: {exc}") from exc
    raise ConfigError(f"{ctx}.policy must be 'hard' or 'adaptive'")


def _parse_quadrature(data: dict, q_unit: float) -> QuadratureSpec:
    b = _Block(data, "quadrature")
    rel_tol = _number(b.take("rel_tol", default=1e-4), "quadrature.rel_tol")
    abs_tol = _number(b.take("abs_tol", default=0.0), "quadrature.abs_tol")
    max_sub = b.take("max_subdivisions", default=200)
    if not isinstance(max_sub, int) or isinstance(max_sub, bool):
        raise ConfigError("quadrature.max_subdivisions must be an integer")
    cutoff_data = b.take("cutoff", default=None)
    b.finish()
    policy = (
        _parse_cutoff(cutoff_data, "quadrature.cutoff", q_unit)
        if cutoff_data is not None
        else AdaptiveConverged()
    )
    try:
        return QuadratureSpec(
            rel_tol=rel_tol,
            abs_tol=abs_tol,
            max_subdivisions=max_sub,
            cutoff_policy=policy,
        )
    except ValueError as exc:
        raise ConfigError(f"quadrature: {exc}") from exc


def _parse_grid(data: dict, ctx: str, scale_suffix: str, scale: float,
                default_spacing="linear") -> GridSpec:
    b = _Block(data, ctx)
    lo = _alt_value(b, "min", f"min{scale_suffix}", scale, required=True)
    hi = _alt_value(b, "max", f"max{scale_suffix}", scale, required=True)
    n = b.take("n", required=True)
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError(f"{ctx}.n must be an integer")
    spacing = b.take("spacing", default=default_spacing)
    label = b.take("label", default="")
    b.finish()
    if not isinstance(label, str):
        raise ConfigError(f"{ctx}.label must be a string")
    try:
        return GridSpec(lo=lo, hi=hi, n=n, spacing=spacing, label=label)
    except ConfigError as exc:
        raise ConfigError(f"{ctx}: {exc}") from exc


def _parse_params(scenario: str, data, omega_0: float) -> ScenarioParams:
    w_unit = omega_0
    q_unit = omega_0 / 299_792_458.0
    ctx = scenario.replace("-", "_")
    b = _Block(data if data is not None else {}, ctx)

    if scenario == "dispersion":
        og = b.take("omega_grid", default=None)
        omega_grid = (
            _parse_grid(og, f"{ctx}.omega_grid", "_over_omega0", w_unit)
            if og is not None
            else GridSpec(0.8 * omega_0, 1.4 * omega_0, 240)
        )
        raw = b.take("q_grids", default=None)
        if raw is None:
            qg = b.take("q_grid", default=None)
            raw = [qg] if qg is not None else None
        if raw is None:
            q_grids = (
                GridSpec(0.5 * q_unit, 40.0 * q_unit, 220, "linear", "small-q"),
                GridSpec(1.0 * q_unit, 2e4 * q_unit, 260, "log", "large-q"),
            )
        else:
            if not isinstance(raw, list) or not raw:
                raise ConfigError(f"{ctx}.q_grids must be a non-empty list")
            q_grids = tuple(
                _parse_grid(g, f"{ctx}.q_grids[{i}]", "_omega0_c", q_unit)
                for i, g in enumerate(raw)
            )
        b.finish()
        return DispersionParams(omega_grid=omega_grid, q_grids=q_grids)

    if scenario == "integrand-map":
        omega_fixed = _alt_value(
            b, "omega_fixed", "omega_fixed_over_omega0", w_unit,
            default=1.2 * omega_0,
        )
        opg = b.take("omega_prime_grid", default=None)
        omega_prime_grid = (
            _parse_grid(opg, f"{ctx}.omega_prime_grid", "_over_omega0", w_unit)
            if opg is not None
            else GridSpec(0.8 * omega_0, 1.4 * omega_0, 220)
        )
        qg = b.take("q_grid", default=None)
        q_grid = (
            _parse_grid(qg, f"{ctx}.q_grid", "_omega0_c", q_unit)
            if qg is not None
            else GridSpec(1.0 * q_unit, 2e3 * q_unit, 240, "log")
        )
        b.finish()
        return IntegrandMapParams(
            omega_fixed=omega_fixed,
            omega_prime_grid=omega_prime_grid,
            q_grid=q_grid,
        )

    if scenario == "emission":
        og = b.take("omega_grid", default=None)
        omega_grid = (
            _parse_grid(og, f"{ctx}.omega_grid", "_over_omega0", w_unit, "peaks")
            if og is not None
            else GridSpec(0.8 * omega_0, 1.4 * omega_0, 400, "peaks")
        )
        cl = b.take("cutoff_local", default=None)
        cn = b.take("cutoff_nonlocal", default=None)
        b.finish()
        return EmissionParams(
            omega_grid=omega_grid,
            cutoff_local=(
                _parse_cutoff(cl, f"{ctx}.cutoff_local", q_unit)
                if cl is not None else None
            ),
            cutoff_nonlocal=(
                _parse_cutoff(cn, f"{ctx}.cutoff_nonlocal", q_unit)
                if cn is not None else None
            ),
        )

    if scenario == "decay":
        omega_a = _alt_value(b, "omega_a", "omega_a_over_omega0", w_unit,
                             required=True)
        cl = b.take("cutoff_local", default=None)
        cn = b.take("cutoff_nonlocal", default=None)
        b.finish()
        return DecayParams(
            omega_a=omega_a,
            cutoff_local=(
                _parse_cutoff(cl, f"{ctx}.cutoff_local", q_unit)
                if cl is not None else None
            ),
            cutoff_nonlocal=(
                _parse_cutoff(cn, f"{ctx}.cutoff_nonlocal", q_unit)
                if cn is not None else None
            ),
        )

    # cutoff-study
    omega = _alt_value(b, "omega", "omega_over_omega0", w_unit, required=True)
    cutoffs = b.take("cutoffs", default=None)
    if cutoffs is None:
        scaled = b.take("cutoffs_omega0_c", required=True)
        cutoffs = [_number(c, f"{ctx}.cutoffs_omega0_c[]") * q_unit
                   for c in scaled]
    else:
        cutoffs = [_number(c, f"{ctx}.cutoffs[]") for c in cutoffs]
    b.finish()
    if any(c2 <= c1 for c1, c2 in zip(cutoffs, cutoffs[1:])) or not cutoffs:
        raise ConfigError(f"{ctx}.cutoffs must be strictly increasing")
    return CutoffStudyParams(omega=omega, cutoffs=tuple(cutoffs))


def parse_config_dict(data: dict) -> ScenarioConfig:
    """Validate a configuration dictionary into a ScenarioConfig."""
    b = _Block(data, "config")
    scenario = b.take("scenario", required=True)
    if scenario not in SCENARIOS:
        raise ConfigError(f"config.scenario must be one of {SCENARIOS}")
    model = b.take("model", default="both")
    output_dir = b.take("output_dir", default="out")
    if not isinstance(output_dir, str):
        raise ConfigError("config.output_dir must be a string")

    material = _parse_material(b.take("material", required=True))
    pulse_data = b.take("pulse", default=None)
    pulse = (
        _parse_pulse(pulse_data, material.omega_0)
        if pulse_data is not None
        else None
    )
    geometry = _parse_geometry(b.take("geometry", required=True))
    quad_data = b.take("quadrature", default=None)
    q_unit = material.omega_0 / 299_792_458.0
    quadrature = (
        _parse_quadrature(quad_data, q_unit)
        if quad_data is not None
        else QuadratureSpec()
    )
    params = _parse_params(
        scenario, b.take(scenario.replace("-", "_"), default=None),
        material.omega_0,
    )
    b.finish()
    return ScenarioConfig(
        scenario=scenario,
        model=model,
        output_dir=output_dir,
        material=material,
        pulse=pulse,
        geometry=geometry,
        quadrature=quadrature,
        params=params,
    )


def parse_config(path) -> ScenarioConfig:
    """Load and validate a JSON scenario configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return parse_config_dict(data)


def _grid_jsonable(gs: GridSpec) -> dict:
    out = {"min": gs.lo, "max": gs.hi, "n": gs.n, "spacing": gs.spacing}
    if gs.label:
        out["label"] = gs.label
    return out


def _params_jsonable(params: ScenarioParams) -> dict:
    if isinstance(params, DispersionParams):
        return {
            "omega_grid": _grid_jsonable(params.omega_grid),
            "q_grids": [_grid_jsonable(g) for g in params.q_grids],
        }
    if isinstance(params, IntegrandMapParams):
        return {
            "omega_fixed": params.omega_fixed,
            "omega_prime_grid": _grid_jsonable(params.omega_prime_grid),
            "q_grid": _grid_jsonable(params.q_grid),
        }
    if isinstance(params, EmissionParams):
        out = {"omega_grid": _grid_jsonable(params.omega_grid)}
        if params.cutoff_local is not None:
            out["cutoff_local"] = policy_to_jsonable(params.cutoff_local)
        if params.cutoff_nonlocal is not None:
            out["cutoff_nonlocal"] = policy_to_jsonable(params.cutoff_nonlocal)
        return out
    if isinstance(params, DecayParams):
        out = {"omega_a": params.omega_a}
        if params.cutoff_local is not None:
            out["cutoff_local"] = policy_to_jsonable(params.cutoff_local)
        if params.cutoff_nonlocal is not None:
            out["cutoff_nonlocal"] = policy_to_jsonable(params.cutoff_nonlocal)
        return out
    return {"omega": params.omega, "cutoffs": list(params.cutoffs)}


def to_jsonable(cfg: ScenarioConfig) -> dict:
    """Canonical SI-unit dictionary form; parses back to an equal config."""
    mat, pulse, geom, spec = cfg.material, cfg.pulse, cfg.geometry, cfg.quadrature
    out = {
        "scenario": cfg.scenario,
        "model": cfg.model,
        "output_dir": cfg.output_dir,
        "material": {
            "eps_inf": mat.eps_inf,
            "omega_p": mat.omega_p,
            "omega_0": mat.omega_0,
            "gamma": mat.gamma,
            "beta": mat.beta,
        },
        "geometry": {"d_s": geom.d_s, "d": geom.d},
        "quadrature": {
            "rel_tol": spec.rel_tol,
            "abs_tol": spec.abs_tol,
            "max_subdivisions": spec.max_subdivisions,
            "cutoff": policy_to_jsonable(spec.cutoff_policy),
        },
        cfg.scenario.replace("-", "_"): _params_jsonable(cfg.params),
    }
    if pulse is not None:
        out["pulse"] = {
            "delta_omega": pulse.delta_omega,
            "Omega": pulse.Omega,
            "T": pulse.T,
        }
    return out


def serialize(cfg: ScenarioConfig) -> str:
    return json.dumps(to_jsonable(cfg), indent=2, sort_keys=True)
