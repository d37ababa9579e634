"""Configuration parsing, scenario runner outputs, CLI exit codes."""

import json

import pytest
from click.testing import CliRunner

from dceslab.cli import PRESETS, load_preset, main
from dceslab.config import (
    ConfigError,
    parse_config_dict,
    serialize,
)
from dceslab.runner import run_scenario

W0 = 1.49e14


def base_config(**overrides):
    cfg = {
        "scenario": "emission",
        "model": "both",
        "output_dir": "out",
        "material": {
            "eps_inf": 6.7,
            "omega_p": 1.049e14,
            "omega_0": 1.49e14,
            "gamma": 8.97e11,
            "beta": 1.539e6,
        },
        "pulse": {"delta_omega": 0.01, "Omega_over_omega0": 2.2, "T_fs": 80.0},
        "geometry": {"d_s_nm": 100.0, "d_nm": 10.0},
        "emission": {
            "omega_grid": {
                "min_over_omega0": 1.0,
                "max_over_omega0": 1.25,
                "n": 6,
                "spacing": "linear",
            },
            "cutoff_local": {"policy": "hard", "q_c_omega0_c": 630.0},
        },
        "quadrature": {"rel_tol": 1e-3},
    }
    cfg.update(overrides)
    return cfg


class TestParsing:
    def test_presets_parse(self):
        for name in PRESETS:
            cfg = load_preset(name)
            assert cfg.material.omega_0 == 1.49e14

    def test_fig4b_parameters(self):
        cfg = load_preset("sic-fig4b")
        assert cfg.pulse.Omega == pytest.approx(2.2 * W0)
        assert cfg.pulse.T == pytest.approx(80e-15)
        assert cfg.material.beta == pytest.approx(1.539e6)
        assert cfg.scenario == "emission"

    def test_missing_material_key(self):
        cfg = base_config(material={})
        with pytest.raises(ConfigError, match="omega_p required"):
            parse_config_dict(cfg)

    def test_perturbative_regime_enforced(self):
        cfg = base_config()
        cfg["pulse"]["delta_omega"] = 0.5
        with pytest.raises(ConfigError, match="delta_omega"):
            parse_config_dict(cfg)

    def test_unknown_key_rejected(self):
        cfg = base_config()
        cfg["material"]["typo_key"] = 1.0
        with pytest.raises(ConfigError, match="unknown key material.typo_key"):
            parse_config_dict(cfg)
        cfg = base_config(extra_block={})
        with pytest.raises(ConfigError, match="unknown key config.extra_block"):
            parse_config_dict(cfg)

    def test_conflicting_unit_keys_rejected(self):
        cfg = base_config()
        cfg["pulse"]["Omega"] = 3e14
        with pytest.raises(ConfigError, match="only one of"):
            parse_config_dict(cfg)

    def test_nonlocal_needs_beta(self):
        cfg = base_config()
        cfg["material"]["beta"] = 0.0
        with pytest.raises(ConfigError, match="beta"):
            parse_config_dict(cfg)

    def test_pulse_required_outside_dispersion(self):
        cfg = base_config()
        del cfg["pulse"]
        with pytest.raises(ConfigError, match="pulse"):
            parse_config_dict(cfg)

    def test_round_trip_all_presets(self):
        for name in PRESETS:
            cfg = load_preset(name)
            again = parse_config_dict(json.loads(serialize(cfg)))
            assert again == cfg

    def test_round_trip_user_config(self):
        cfg = parse_config_dict(base_config())
        assert parse_config_dict(json.loads(serialize(cfg))) == cfg


def run_small(tmp_path, subdir="a", **overrides):
    cfg = parse_config_dict(
        base_config(output_dir=str(tmp_path / subdir), **overrides)
    )
    lines = []
    files = run_scenario(cfg, echo=lines.append)
    return cfg, files, lines


class TestRunner:
    def test_emission_outputs(self, tmp_path):
        cfg, files, lines = run_small(tmp_path)
        names = sorted(f.name for f in files)
        assert names == [
            "emission_comparison.csv",
            "emission_local.csv",
            "emission_nonlocal.csv",
        ]
        for f in files:
            assert f.exists()
            assert f.with_suffix(".json").exists()
        assert any("emission[local]" in ln for ln in lines)
        header = files[0].read_text().splitlines()[0]
        assert header.startswith("omega_over_omega0,rate,error_estimate")

    def test_determinism_byte_identical(self, tmp_path):
        _, files1, _ = run_small(tmp_path, "r1")
        _, files2, _ = run_small(tmp_path, "r2")
        for f1, f2 in zip(sorted(files1), sorted(files2)):
            assert f1.read_bytes() == f2.read_bytes()

    def test_sidecar_reruns_exactly(self, tmp_path):
        cfg, files, _ = run_small(tmp_path, "first")
        sidecar = json.loads(files[0].with_suffix(".json").read_text())
        cfg2 = parse_config_dict(sidecar["config"])
        assert cfg2 == cfg
        cfg3 = parse_config_dict(
            {**sidecar["config"], "output_dir": str(tmp_path / "second")}
        )
        files3 = run_scenario(cfg3, echo=lambda *_: None)
        for f1, f3 in zip(sorted(files1 := files), sorted(files3)):
            assert f1.read_bytes() == f3.read_bytes()

    def test_divergence_is_not_an_error(self, tmp_path):
        # local model under the adaptive policy: flagged, still exit-clean
        cfg, files, _ = run_small(
            tmp_path,
            "div",
            model="local",
            emission={
                "omega_grid": {
                    "min_over_omega0": 1.1,
                    "max_over_omega0": 1.2,
                    "n": 2,
                    "spacing": "linear",
                }
            },
        )
        body = [
            ln.split(",") for ln in
            files[0].read_text().splitlines()[1:]
        ]
        assert all(row[3] == "false" for row in body)

    def test_dispersion_outputs(self, tmp_path):
        cfg_dict = {
            "scenario": "dispersion",
            "model": "both",
            "output_dir": str(tmp_path / "disp"),
            "material": base_config()["material"],
            "geometry": {"d_s_nm": 100.0, "d_nm": 10.0},
            "dispersion": {
                "omega_grid": {
                    "min_over_omega0": 0.9,
                    "max_over_omega0": 1.3,
                    "n": 12,
                },
                "q_grids": [
                    {
                        "min_omega0_c": 1.0,
                        "max_omega0_c": 500.0,
                        "n": 10,
                        "spacing": "log",
                        "label": "wide",
                    }
                ],
            },
        }
        cfg = parse_config_dict(cfg_dict)
        files = run_scenario(cfg, echo=lambda *_: None)
        names = {f.name for f in files}
        assert names == {
            "dispersion_local_wide.csv",
            "dispersion_nonlocal_wide.csv",
            "surface_modes_local_wide.csv",
            "surface_modes_nonlocal_wide.csv",
            "dispersion_comparison_wide.csv",
        }
        matrix = (tmp_path / "disp" / "dispersion_local_wide.csv").read_text()
        rows = matrix.splitlines()
        assert rows[0].split(",")[0] == "omega_rad_per_s"
        assert len(rows) == 13  # header + omega rows
        assert len(rows[1].split(",")) == 11  # omega column + q columns


class TestCli:
    def test_requires_exactly_one_source(self):
        runner = CliRunner()
        res = runner.invoke(main, ["emission"])
        assert res.exit_code == 1
        assert "config error" in res.output

    def test_bad_config_exit_1(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        res = CliRunner().invoke(main, ["emission", "--config", str(p)])
        assert res.exit_code == 1

    def test_scenario_mismatch(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps(base_config(output_dir=str(tmp_path / "o"))))
        res = CliRunner().invoke(main, ["dispersion", "--config", str(p)])
        assert res.exit_code == 1
        assert "scenario" in res.output

    def test_emission_run_exit_0(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps(base_config(output_dir=str(tmp_path / "o"))))
        res = CliRunner().invoke(
            main, ["emission", "--config", str(p), "--model", "local"]
        )
        assert res.exit_code == 0, res.output
        assert (tmp_path / "o" / "emission_local.csv").exists()
        assert not (tmp_path / "o" / "emission_nonlocal.csv").exists()

    def test_q_cutoff_override(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps(base_config(output_dir=str(tmp_path / "o"))))
        res = CliRunner().invoke(
            main,
            ["emission", "--config", str(p), "--model", "nonlocal",
             "--q-cutoff", "5e8"],
        )
        assert res.exit_code == 0, res.output
        side = json.loads(
            (tmp_path / "o" / "emission_nonlocal.json").read_text()
        )
        assert side["config"]["quadrature"]["cutoff"] == {
            "policy": "hard",
            "q_c": 5e8,
        }
        body = (tmp_path / "o" / "emission_nonlocal.csv").read_text()
        q_max = {float(ln.split(",")[4]) for ln in body.splitlines()[1:]}
        assert q_max == {5e8}

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            load_preset("sic-fig9")
