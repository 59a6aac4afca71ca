"""CLI subcommands: reports, exit codes, config precedence, reproducibility."""

import json
import math
import subprocess
import sys

import pytest

from cavityghz.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


class TestPrepareEpr:
    def test_report_fields_and_fidelity(self, capsys):
        code, report = run_cli(capsys, "prepare-epr", "--alpha", "2", "--dim", "64")
        assert code == 0
        assert abs(report["fidelity"] - 1.0) < 1e-10
        assert report["variant"] == "phi+"
        assert report["records"][0]["atom"] == "A3"
        assert report["records"][0]["post_selected"] is True

    def test_zero_alpha_is_validation_error(self, capsys):
        assert main(["prepare-epr", "--alpha", "0"]) == 2

    def test_small_dim_is_numerical_error(self, capsys):
        assert main(["prepare-epr", "--alpha", "2", "--dim", "4"]) == 3

    @pytest.mark.parametrize("variant", ["phi+", "phi-", "psi+", "psi-"])
    def test_variants(self, capsys, variant):
        code, report = run_cli(capsys, "prepare-epr", "--variant", variant)
        assert code == 0
        assert report["fidelity"] >= 1 - 1e-10

    def test_off_pi_phase_degrades_fidelity(self, capsys):
        code, report = run_cli(capsys, "prepare-epr", "--phi", "2.8")
        assert code == 0
        assert report["fidelity"] < 0.99


class TestPrepareGhz:
    def test_atomic(self, capsys):
        code, report = run_cli(capsys, "prepare-ghz", "--sign", "-", "--mode", "atomic")
        assert code == 0
        assert report["fidelity"] >= 1 - 1e-10

    def test_hybrid(self, capsys):
        code, report = run_cli(capsys, "prepare-ghz", "--sign", "+", "--mode", "hybrid")
        assert code == 0
        assert report["fidelity"] >= 1 - 1e-10


class TestGhzTest:
    def test_single_shot_plus(self, capsys):
        code, report = run_cli(capsys, "ghz-test", "--sign", "+", "--shots", "1")
        assert code == 0
        assert report["verdict"] == "QM"
        assert report["product_histogram"] == {"1": 1}
        (branch,) = report["branch_counts"]
        assert branch in ("g,g,g", "g,f,f", "f,f,g", "f,g,f")

    def test_hybrid_minus_thousand_shots(self, capsys):
        code, report = run_cli(
            capsys, "ghz-test", "--sign", "-", "--mode", "hybrid", "--shots", "1000"
        )
        assert code == 0
        assert report["all_match_qm"] is True
        assert report["product_histogram"] == {"-1": 1000}
        assert report["qm_prediction"] == -1
        assert report["lhv_prediction"] == 1

    def test_expected_probabilities_included(self, capsys):
        code, report = run_cli(capsys, "ghz-test", "--shots", "2")
        assert code == 0
        assert set(report["branch_expected"]) == {"g,g,g", "g,f,f", "f,f,g", "f,g,f"}
        for value in report["branch_expected"].values():
            assert abs(value - 0.25) < 1e-10

    def test_zero_shots_rejected(self, capsys):
        assert main(["ghz-test", "--shots", "0"]) == 2


class TestProbeSweep:
    def test_table_and_csv(self, capsys, tmp_path):
        csv_path = tmp_path / "sweep.csv"
        code, report = run_cli(capsys, "probe-sweep", "--alpha", "2", "--csv", str(csv_path))
        assert code == 0
        assert report["nbar"] == 16
        assert abs(report["optimal_gt"] - math.pi / 8) < 1e-12
        assert len(report["table"]) == 41
        closure = [abs(row["p_a"] + row["p_b"] - 1) for row in report["table"]]
        assert max(closure) < 1e-12
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "gt,p_a,p_b"
        assert len(lines) == 42


class TestDispersiveConvergence:
    def test_default_sweep(self, capsys):
        code, report = run_cli(capsys, "dispersive-convergence", "--dim", "16")
        assert code == 0
        assert report["monotone_decreasing"] is True
        distances = [row["distance"] for row in report["table"]]
        assert distances[0] > distances[1] > distances[2]
        for ratio in report["ratios"]:
            assert 1.5 <= ratio <= 2.5

    def test_single_entry_has_no_monotonicity_claim(self, capsys):
        code, report = run_cli(
            capsys, "dispersive-convergence", "--dim", "16", "--delta-over-g", "80"
        )
        assert code == 0
        assert len(report["table"]) == 1
        assert "monotone_decreasing" not in report
        assert "ratios" not in report

    def test_small_ratio_rejected(self, capsys):
        assert main(["dispersive-convergence", "--delta-over-g", "5,50"]) == 2


class TestConfigAndSchema:
    def test_config_file_and_flag_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# sweep setup\nalpha = 1.5\ndim = 96\nseed = 9\n", encoding="utf-8")
        code, report = run_cli(
            capsys, "prepare-epr", "--config", str(cfg), "--alpha", "2.0"
        )
        assert code == 0
        assert report["config"]["alpha"] == 2.0  # flag wins
        assert report["config"]["dim"] == 96  # file beats default
        assert report["seed"] == 9

    def test_unknown_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("omega = 3\n", encoding="utf-8")
        assert main(["prepare-epr", "--config", str(cfg)]) == 2

    def test_reports_are_byte_identical(self, capsys):
        args = ["ghz-test", "--shots", "25", "--seed", "123"]
        main(args)
        first = capsys.readouterr().out
        main(args)
        second = capsys.readouterr().out
        assert first == second

    @pytest.mark.parametrize(
        "argv",
        [
            ["prepare-epr"],
            ["prepare-ghz"],
            ["ghz-test", "--shots", "1"],
            ["probe-sweep"],
            ["dispersive-convergence", "--dim", "16"],
        ],
    )
    def test_schema_stability(self, capsys, argv):
        code, report = run_cli(capsys, *argv)
        assert code == 0
        for key in ("command", "version", "seed", "config"):
            assert key in report
        assert report["version"]

    def test_output_file(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        code = main(["prepare-ghz", "--output", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["command"] == "prepare-ghz"

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "cavityghz.cli", "ghz-test", "--shots", "3"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["verdict"] == "QM"
