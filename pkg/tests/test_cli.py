"""Configuration parsing, command dispatch, artifact outputs."""

import json
from pathlib import Path

import numpy as np
import pytest

from boussinesq_lp import cli, fileio
from boussinesq_lp.boussinesq import synthesize_holder_field
from boussinesq_lp.spectral import linf_norm, make_grid


class TestParseConfig:
    def test_basic_solve_flags(self, tmp_path):
        config = cli.parse_config(
            ["solve", "--n", "64", "--r", "1.5", "--T", "1.0", "--dt", "1e-3",
             "--out-dir", str(tmp_path)]
        )
        assert config.command == "solve"
        assert config.n == 64 and config.r == 1.5 and config.T == 1.0

    def test_power_of_two_rule(self, tmp_path):
        with pytest.raises(cli.ConfigError) as err:
            cli.parse_config(["solve", "--n", "100", "--out-dir", str(tmp_path)])
        assert any("power of two" in p for p in err.value.problems)

    def test_flag_overrides_config_file(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"r": 1.5, "n": 64}))
        config = cli.parse_config(
            ["solve", "--config", str(cfg), "--r", "2.0", "--out-dir", str(tmp_path)]
        )
        assert config.r == 2.0
        assert config.n == 64

    def test_preset_overridden_by_flags(self, tmp_path):
        config = cli.parse_config(
            ["solve", "--preset", "hydrostatic", "--T", "0.5", "--out-dir", str(tmp_path)]
        )
        assert config.data == "hydrostatic"
        assert config.T == 0.5

    def test_unknown_command_exits(self):
        with pytest.raises(SystemExit):
            cli.parse_config(["frobnicate"])

    def test_unknown_config_field(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"viscosity": 1.0}))
        with pytest.raises(cli.ConfigError) as err:
            cli.parse_config(["solve", "--config", str(cfg), "--out-dir", str(tmp_path)])
        assert any("viscosity" in p for p in err.value.problems)

    def test_collects_all_problems(self, tmp_path):
        with pytest.raises(cli.ConfigError) as err:
            cli.parse_config(
                ["solve", "--n", "100", "--r", "-1", "--dt", "-2", "--out-dir", str(tmp_path)]
            )
        assert len(err.value.problems) >= 3

    def test_verify_requires_known_estimate(self, tmp_path):
        with pytest.raises(cli.ConfigError):
            cli.parse_config(["verify", "--estimate", "bogus", "--out-dir", str(tmp_path)])


class TestRun:
    def test_verify_writes_report(self, tmp_path):
        config = cli.parse_config(
            ["verify", "--estimate", "lemma2.5", "--quick", "--n", "32",
             "--out-dir", str(tmp_path)]
        )
        assert cli.run(config) == 0
        payload = json.loads((tmp_path / "estimate_lemma2_5.json").read_text())
        assert payload["name"] == "lemma2.5"
        assert payload["c_emp"] > 0
        summary = (tmp_path / "estimates_summary.csv").read_text().splitlines()
        assert summary[0].startswith("estimate,")
        assert summary[1].startswith("lemma2.5,")

    def test_solve_hydrostatic_summary(self, tmp_path, capsys):
        config = cli.parse_config(
            ["solve", "--preset", "hydrostatic", "--T", "0.2", "--out-dir", str(tmp_path)]
        )
        assert cli.run(config) == 0
        out = capsys.readouterr().out
        assert "bkm_integral=" in out and "verdict=FINITE" in out
        bkm = float(out.split("bkm_integral=")[1].split()[0])
        assert bkm <= 1e-8
        rows = (tmp_path / "monitor.csv").read_text().splitlines()
        assert rows[0] == "t,grad_u_inf,bkm_integral,theta_r,u_r,div_residual"
        assert len(rows) > 2

    def test_solve_cfl_violation_exit_code(self, tmp_path):
        config = cli.parse_config(
            ["solve", "--preset", "taylor-green", "--T", "1.0", "--dt", "0.5",
             "--out-dir", str(tmp_path)]
        )
        assert cli.run(config) == 1

    def test_thresholds_domain_error_names_formula(self, tmp_path, capsys):
        config = cli.parse_config(
            ["thresholds", "--data", "random", "--amplitude", "1.0",
             "--theta-amplitude", "1.0", "--C", "1.0", "--a0", "0.02",
             "--out-dir", str(tmp_path)]
        )
        assert cli.run(config) == 2
        assert "T1_1" in capsys.readouterr().err

    def test_thresholds_success(self, tmp_path, capsys):
        config = cli.parse_config(
            ["thresholds", "--data", "random", "--amplitude", "0.002",
             "--theta-amplitude", "0.002", "--seed", "1", "--C", "2.7",
             "--out-dir", str(tmp_path)]
        )
        assert cli.run(config) == 0
        assert "t_star=" in capsys.readouterr().out
        payload = json.loads((tmp_path / "thresholds.json").read_text())
        assert payload["t_star"] > 0

    def test_iterate_preset(self, tmp_path, capsys):
        config = cli.parse_config(
            ["iterate", "--preset", "small-data-iteration", "--out-dir", str(tmp_path)]
        )
        assert cli.run(config) == 0
        out = capsys.readouterr().out
        assert "contracting=True" in out
        rows = (tmp_path / "iterations.csv").read_text().splitlines()
        assert rows[0] == "n,cauchy_gap_theta,cauchy_gap_u,ratio"

    def test_lp_analyze(self, tmp_path):
        config = cli.parse_config(
            ["lp-analyze", "--n", "64", "--r", "1.5", "--seed", "3",
             "--out-dir", str(tmp_path)]
        )
        assert cli.run(config) == 0
        payload = json.loads((tmp_path / "besov_report.json").read_text())
        assert set(payload) == {"s", "p", "q", "blocks", "value", "homogeneous_value"}

    def test_probe_outputs(self, tmp_path, capsys):
        config = cli.parse_config(
            ["probe", "--preset", "taylor-green", "--T", "0.02", "--dt", "2e-3",
             "--eps", "1e-4", "--out-dir", str(tmp_path)]
        )
        assert cli.run(config) == 0
        assert (tmp_path / "probe_eps0.0001.csv").exists()

    def test_byte_identical_reruns(self, tmp_path):
        outputs = []
        for sub in ("a", "b"):
            out_dir = tmp_path / sub
            config = cli.parse_config(
                ["solve", "--preset", "taylor-green", "--T", "0.02",
                 "--seed", "5", "--out-dir", str(out_dir)]
            )
            assert cli.run(config) == 0
            outputs.append(
                {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}
            )
        assert outputs[0].keys() == outputs[1].keys()
        for name in outputs[0]:
            assert outputs[0][name] == outputs[1][name], name


class TestSnapshotIO:
    def test_roundtrip(self, tmp_path, grid64):
        f = synthesize_holder_field(grid64, 1.5, 1.0, 11)
        path = tmp_path / "field.snap"
        fileio.write_snapshot(path, f, "theta", 0.25)
        back, header = fileio.read_snapshot(path)
        assert header == {"n": 64, "L": 2 * np.pi, "name": "theta", "t": 0.25}
        assert linf_norm(back - f) < 1e-12 * linf_norm(f)

    def test_transport_trajectory_csv(self, tmp_path, grid64):
        from boussinesq_lp.littlewood_paley import holder_norm
        from boussinesq_lp.spectral import VectorField
        from boussinesq_lp.transport import TransportProblem, solve

        f0 = synthesize_holder_field(grid64, 1.5, 1.0, 13)
        v = VectorField.from_values(
            grid64, np.full((64, 64), 0.5), np.zeros((64, 64))
        )
        traj = solve(TransportProblem(f0, v, None, 0.02, 2e-3), observers=5)
        rows = [
            (t, linf_norm(f), holder_norm(f, 1.5).value, f.mean())
            for t, f in zip(traj.times, traj.fields)
        ]
        path = tmp_path / "trajectory.csv"
        fileio.trajectory_to_csv(path, rows)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,linf,holder_r,mean"
        assert len(lines) == len(rows) + 1

    def test_header_is_single_json_line(self, tmp_path, grid64):
        f = synthesize_holder_field(grid64, 1.5, 1.0, 12)
        path = tmp_path / "field.snap"
        fileio.write_snapshot(path, f, "theta", 0.0)
        first_line = path.read_bytes().split(b"\n", 1)[0]
        json.loads(first_line)
