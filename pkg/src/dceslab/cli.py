"""Command-line entry point.

One subcommand per scenario; each takes either a bundled preset or a
JSON config file, plus a few overrides.  Exit codes: 0 success (flagged
divergence included), 1 configuration error, 2 numeric failure, 3 I/O
failure.
"""

from __future__ import annotations

import sys
from dataclasses import replace
from importlib import resources

import click

from .config import ConfigError, ScenarioConfig, parse_config, parse_config_dict
from .quadrature import HardCutoff
from .runner import NumericError, run_scenario

PRESETS = ("sic-fig2", "sic-fig3", "sic-fig4a", "sic-fig4b", "sic-fig4c")


def load_preset(name: str) -> ScenarioConfig:
    """Parse one of the bundled scenario presets."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}'; choose from {PRESETS}")
    import json

    ref = resources.files("dceslab.presets").joinpath(f"{name}.json")
    return parse_config_dict(json.loads(ref.read_text()))


def _load(scenario: str, config, preset, model, out, rel_tol, q_cutoff):
    if (config is None) == (preset is None):
        raise ConfigError("give exactly one of --config or --preset")
    cfg = parse_config(config) if config else load_preset(preset)
    if cfg.scenario != scenario:
        raise ConfigError(
            f"config is for scenario '{cfg.scenario}', not '{scenario}'"
        )
    if model:
        cfg = replace(cfg, model=model)
        if model != "local" and cfg.material.beta == 0:
            raise ConfigError("nonlocal model requires material.beta > 0")
    if out:
        cfg = replace(cfg, output_dir=out)
    if rel_tol is not None:
        cfg = replace(cfg, quadrature=replace(cfg.quadrature, rel_tol=rel_tol))
    if q_cutoff is not None:
        if q_cutoff <= 0:
            raise ConfigError("--q-cutoff must be > 0")
        cfg = replace(
            cfg,
            quadrature=replace(
                cfg.quadrature, cutoff_policy=HardCutoff(q_c=q_cutoff)
            ),
        )
        # the flag forces one hard cutoff everywhere
        if hasattr(cfg.params, "cutoff_local"):
            cfg = replace(
                cfg,
                params=replace(
                    cfg.params, cutoff_local=None, cutoff_nonlocal=None
                ),
            )
    return cfg


def _common_options(fn):
    fn = click.option(
        "--config", type=click.Path(), default=None,
        help="JSON scenario configuration file.",
    )(fn)
    fn = click.option(
        "--preset", type=click.Choice(PRESETS), default=None,
        help="Bundled scenario preset.",
    )(fn)
    fn = click.option(
        "--model", type=click.Choice(["local", "nonlocal", "both"]),
        default=None, help="Override the material model selection.",
    )(fn)
    fn = click.option("--out", type=click.Path(), default=None,
                      help="Output directory override.")(fn)
    fn = click.option("--rel-tol", type=float, default=None,
                      help="Quadrature relative tolerance override.")(fn)
    fn = click.option(
        "--q-cutoff", type=float, default=None,
        help="Force a hard wavenumber cutoff [rad/m] for all integrals.",
    )(fn)
    return fn


def _run(scenario: str, **kwargs) -> None:
    try:
        cfg = _load(scenario, **kwargs)
        files = run_scenario(cfg, echo=click.echo)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)
    except NumericError as exc:
        click.echo(f"numeric failure: {exc}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"i/o failure: {exc}", err=True)
        sys.exit(3)
    click.echo(f"wrote {len(files)} files")


@click.group()
def main():
    """Pair-generation and emission observables of a time-modulated slab."""


@main.command("dispersion")
@_common_options
def cmd_dispersion(**kwargs):
    """Slab reflectivity density maps plus surface-mode curves."""
    _run("dispersion", **kwargs)


@main.command("integrand-map")
@_common_options
def cmd_integrand_map(**kwargs):
    """Pair-generation integrand over (omega', q) at fixed omega."""
    _run("integrand-map", **kwargs)


@main.command("emission")
@_common_options
def cmd_emission(**kwargs):
    """Pair-generation spectral rate over an emission-frequency grid."""
    _run("emission", **kwargs)


@main.command("decay")
@_common_options
def cmd_decay(**kwargs):
    """Decay-rate enhancement factor at the atomic transition frequency."""
    _run("decay", **kwargs)


@main.command("cutoff-study")
@_common_options
def cmd_cutoff_study(**kwargs):
    """Spectral rate versus hard wavenumber cutoff."""
    _run("cutoff-study", **kwargs)


if __name__ == "__main__":
    main()
