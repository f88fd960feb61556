import json
import math

import numpy as np
import pytest

from weakinv.cli import main

SZ_LITERAL = [[1, 0], [0, 0], [0, 0], [-1, 0]]
SMINUS_LITERAL = [[0, 0], [1, 0], [0, 0], [0, 0]]
ZERO2_LITERAL = [[0, 0], [0, 0], [0, 0], [0, 0]]


def write_config(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def amp_damp_config(tmp_path, n_steps=500, t_end=1.0, **extra):
    cfg = {"scenario": "amp-damp", "grid": {"t_start": 0.0, "t_end": t_end, "n_steps": n_steps}}
    cfg.update(extra)
    return write_config(tmp_path / "cfg.json", cfg)


class TestSimulate:
    def test_writes_files_and_succeeds(self, tmp_path):
        cfg = amp_damp_config(tmp_path)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
        assert (tmp_path / "state.csv").exists()
        monitors = json.loads((tmp_path / "monitors.json").read_text())
        assert monitors["violations"] == []
        assert monitors["max_trace_drift"] <= 1e-10

    def test_scenario_as_positional(self, tmp_path):
        assert main(["simulate", "amp-damp", "--steps", "200", "--out", str(tmp_path)]) == 0

    def test_zero_steps_rejected(self, tmp_path, capsys):
        cfg = amp_damp_config(tmp_path, n_steps=0)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 1
        assert "grid.n_steps must be ≥ 1" in capsys.readouterr().err

    def test_leakage_violation_exits_2(self, tmp_path, capsys):
        # all population parked on the top retained level of the oscillator
        dim = 6
        rho0 = [[0, 0]] * (dim * dim)
        rho0[dim * dim - 1] = [1, 0]
        cfg = write_config(
            tmp_path / "cfg.json",
            {
                "scenario": "damped-ho",
                "scenario_args": {"n_trunc": dim},
                "grid": {"t_start": 0.0, "t_end": 0.5, "n_steps": 100},
                "rho0": rho0,
            },
        )
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 2
        monitors = json.loads((tmp_path / "monitors.json").read_text())
        assert "leakage" in monitors["violations"]

    def test_unknown_scenario(self, tmp_path, capsys):
        assert main(["simulate", "no-such-thing", "--out", str(tmp_path)]) == 1
        assert "unknown scenario" in capsys.readouterr().err

    def test_missing_scenario(self, tmp_path, capsys):
        assert main(["simulate", "--out", str(tmp_path)]) == 1
        assert "scenario" in capsys.readouterr().err

    def test_determinism(self, tmp_path):
        cfg = amp_damp_config(tmp_path, n_steps=300)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
        for name in ("state.csv", "monitors.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestInvariant:
    def test_sz_seed_conserves_minus_one(self, tmp_path):
        cfg = amp_damp_config(tmp_path, n_steps=1000, invariant_seed="sz")
        assert main(["invariant", "--config", cfg, "--out", str(tmp_path)]) == 0
        rows = (tmp_path / "expectation.csv").read_text().splitlines()[1:]
        values = [float(r.split(",")[1]) for r in rows]
        assert max(abs(v + 1.0) for v in values) <= 1e-8
        report = json.loads((tmp_path / "invariant_report.json").read_text())
        assert report["classification"] == "weak"
        spectrum = (tmp_path / "spectrum.csv").read_text().splitlines()
        assert spectrum[0] == "t,lambda_1,lambda_2"
        last = [float(x) for x in spectrum[-1].split(",")]
        assert last[1] == pytest.approx(1.0 - 2.0 * math.e, abs=1e-6)

    def test_identity_seed_strong_like(self, tmp_path):
        cfg = amp_damp_config(tmp_path, invariant_seed="identity")
        assert main(["invariant", "--config", cfg, "--out", str(tmp_path)]) == 0
        rows = (tmp_path / "expectation.csv").read_text().splitlines()[1:]
        assert all(abs(float(r.split(",")[1]) - 1.0) <= 1e-10 for r in rows)
        report = json.loads((tmp_path / "invariant_report.json").read_text())
        assert report["classification"] == "strong-like"

    def test_gamma_zero_hamiltonian_seed_strong_like(self, tmp_path):
        cfg = amp_damp_config(
            tmp_path,
            scenario_args={"gamma": 0.0},
            invariant_seed="hamiltonian",
        )
        assert main(["invariant", "--config", cfg, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "invariant_report.json").read_text())
        assert report["classification"] == "strong-like"

    def test_blowup_exits_2_with_step(self, tmp_path, capsys):
        cfg = amp_damp_config(tmp_path, n_steps=100, scenario_args={"gamma": 40.0},
                              invariant_seed="sz")
        assert main(["invariant", "--config", cfg, "--out", str(tmp_path)]) == 2
        assert "node" in capsys.readouterr().err

    def test_seed_literal(self, tmp_path):
        cfg = amp_damp_config(tmp_path, invariant_seed=SZ_LITERAL)
        assert main(["invariant", "--config", cfg, "--out", str(tmp_path)]) == 0


class TestActionCheck:
    def test_trivial_inline_model(self, tmp_path):
        cfg = write_config(
            tmp_path / "cfg.json",
            {
                "scenario": {
                    "dim": 2,
                    "hamiltonian": {"kind": "constant", "value": ZERO2_LITERAL},
                    "channels": [],
                },
                "grid": {"t_start": 0.0, "t_end": 1.0, "n_steps": 100},
                "lambda_final": ZERO2_LITERAL,
            },
        )
        assert main(["action-check", "--config", cfg, "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "action_report.json").read_text())
        assert report["action"] == 0.0
        assert report["grad_rho_residual"] <= 1e-13
        assert report["grad_lam_residual"] <= 1e-13
        assert report["gauge_defect"] <= 1e-12

    def test_amp_damp_residuals_shrink(self, tmp_path):
        reports = {}
        for n in (500, 1000):
            cfg = amp_damp_config(tmp_path, n_steps=n, lambda_final=SZ_LITERAL)
            out = tmp_path / f"n{n}"
            assert main(["action-check", "--config", cfg, "--out", str(out)]) == 0
            reports[n] = json.loads((out / "action_report.json").read_text())
        ratio = reports[500]["grad_rho_residual"] / reports[1000]["grad_rho_residual"]
        assert 3.0 <= ratio <= 5.0
        assert reports[1000]["boundary_rho"] <= 1e-8
        assert reports[1000]["boundary_lam"] <= 1e-8

    def test_missing_lambda_final(self, tmp_path, capsys):
        cfg = amp_damp_config(tmp_path)
        assert main(["action-check", "--config", cfg, "--out", str(tmp_path)]) == 1
        assert "lambda_final" in capsys.readouterr().err


class TestVerify:
    def test_passes_and_writes_report(self, tmp_path, capsys):
        assert main(["verify", "--seed", "42", "--trials", "20", "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "verify_report.json").read_text())
        assert report["all_pass"] is True
        names = {p["name"] for p in report["properties"]}
        assert {"adjoint_pairing", "shift_invariance", "expectation_conservation"} <= names
        out = capsys.readouterr().out
        assert "adjoint_pairing" in out

    def test_trials_one_still_valid(self, tmp_path):
        assert main(["verify", "--trials", "1", "--out", str(tmp_path)]) == 0

    def test_break_adjoint_negative_control(self, tmp_path):
        code = main(["verify", "--seed", "0", "--trials", "10", "--break-adjoint",
                     "--out", str(tmp_path)])
        assert code == 2
        report = json.loads((tmp_path / "verify_report.json").read_text())
        failed = {p["name"] for p in report["properties"] if not p["pass"]}
        assert "adjoint_pairing" in failed

    def test_determinism(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["verify", "--seed", "7", "--trials", "10", "--out", str(out1)])
        main(["verify", "--seed", "7", "--trials", "10", "--out", str(out2)])
        assert (out1 / "verify_report.json").read_bytes() == (out2 / "verify_report.json").read_bytes()


class TestUsage:
    def test_help_exits_zero(self):
        assert main(["--help"]) == 0

    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_bad_method(self, tmp_path, capsys):
        cfg = amp_damp_config(tmp_path)
        assert main(["simulate", "--config", cfg, "--method", "euler"]) == 1
