import json

import pytest

from cpbandit.cli import main

SWEEP_CONFIG = """
[environment]
mu1 = 0
mu2 = 2
x_star = 0.7
sigma = 1
noise = gaussian

[sweep]
eta = 0.1
budgets = 30, 90
replications = 5
master_seed = 11
workers = 1

[policy.sh]
[policy.shb]
"""


@pytest.fixture
def sweep_config(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text(SWEEP_CONFIG)
    return path


class TestCmdRun:
    def test_zero_noise_example(self, capsys):
        rc = main([
            "run", "--policy", "sh", "--mu1", "0", "--mu2", "2",
            "--xstar", "0.3", "--sigma", "0", "--eta", "0.1", "--T", "30",
            "--seed", "1",
        ])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["estimate"] == pytest.approx(0.3125)
        assert payload["abs_error"] == pytest.approx(0.0125)
        assert payload["pulls_used"] == 27
        assert payload["trace_summary"]["phases"] == 3
        assert payload["trace_summary"]["zoom_left"] == 2

    def test_missing_eta_exits_2_naming_field(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([
                "run", "--policy", "sh", "--mu1", "0", "--mu2", "2",
                "--xstar", "0.3", "--sigma", "0", "--T", "30",
            ])
        assert exc.value.code == 2
        assert "--eta" in capsys.readouterr().err

    def test_budget_too_small_exits_3(self, capsys):
        rc = main([
            "run", "--policy", "sh", "--mu1", "0", "--mu2", "2",
            "--xstar", "0.3", "--sigma", "0", "--eta", "0.1", "--T", "8",
        ])
        assert rc == 3
        assert "BudgetTooSmall" in capsys.readouterr().err

    def test_bad_environment_exits_2(self, capsys):
        rc = main([
            "run", "--policy", "sh", "--mu1", "1", "--mu2", "1",
            "--xstar", "0.3", "--sigma", "0", "--eta", "0.1", "--T", "30",
        ])
        assert rc == 2

    def test_sha_run_reports_dispatch(self, capsys):
        rc = main([
            "run", "--policy", "sha", "--mu1", "0", "--mu2", "2",
            "--xstar", "0.7", "--sigma", "0", "--noise", "none",
            "--eta", "0.1", "--T", "1200", "--sha-sigma", "1.0",
        ])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["dispatch"]["chosen"] == "shb"
        assert payload["dispatch"]["tau"] == pytest.approx(48.2831, abs=1e-3)

    def test_trace_out_writes_json_lines(self, tmp_path, capsys):
        trace_file = tmp_path / "trace.jsonl"
        rc = main([
            "run", "--policy", "shb", "--mu1", "0", "--mu2", "2",
            "--xstar", "0.3", "--sigma", "0", "--noise", "none",
            "--eta", "0.1", "--T", "500", "--trace-out", str(trace_file),
        ])
        assert rc == 0
        lines = trace_file.read_text().strip().split("\n")
        assert len(lines) == 10  # one object per phase
        rec = json.loads(lines[0])
        assert {"phase", "a1", "a2", "a3", "mean0", "mean_a1", "mean_a2",
                "mean_a3", "mean1", "decision"} <= set(rec)


class TestCmdSweep:
    def test_writes_csv_and_row_count(self, sweep_config, tmp_path, capsys):
        out = tmp_path / "rows.csv"
        rc = main(["sweep", "--config", str(sweep_config), "--output", str(out)])
        assert rc == 0
        assert "4 rows" in capsys.readouterr().err
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("policy,T,replications")
        assert len(lines) == 5

    def test_rerun_is_byte_identical(self, sweep_config, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", "--config", str(sweep_config), "--output", str(out1)]) == 0
        assert main(["sweep", "--config", str(sweep_config), "--output", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_workers_do_not_change_bytes(self, sweep_config, tmp_path):
        out1, out2 = tmp_path / "w1.csv", tmp_path / "w2.csv"
        main(["sweep", "--config", str(sweep_config), "--output", str(out1),
              "--workers", "1"])
        main(["sweep", "--config", str(sweep_config), "--output", str(out2),
              "--workers", "2"])
        assert out1.read_bytes() == out2.read_bytes()

    def test_flag_overrides_config_value(self, sweep_config, tmp_path):
        out = tmp_path / "rows.csv"
        main(["sweep", "--config", str(sweep_config), "--output", str(out),
              "--replications", "2"])
        line = out.read_text().strip().split("\n")[1]
        assert line.split(",")[2] == "2"  # replications column

    def test_policy_params_survive_ini_lowercasing(self, tmp_path):
        # configparser lowercases option names; G must still be honored
        cfg = tmp_path / "grid.cfg"
        cfg.write_text(
            SWEEP_CONFIG.replace("budgets = 30, 90", "budgets = 9")
            .replace("[policy.sh]\n[policy.shb]", "[policy.grid_ls]\nG = 3")
        )
        out = tmp_path / "g.csv"
        assert main(["sweep", "--config", str(cfg), "--output", str(out)]) == 0
        row = out.read_text().strip().split("\n")[1].split(",")
        # with the default G=10 this cell would be invalid (floor(9/10)=0)
        assert row[0] == "grid_ls" and row[-1] == "true"

    def test_empty_budgets_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text(SWEEP_CONFIG.replace("budgets = 30, 90", "budgets ="))
        rc = main(["sweep", "--config", str(bad), "--output", "-"])
        assert rc == 2

    def test_missing_config_exit_2(self, tmp_path):
        rc = main(["sweep", "--config", str(tmp_path / "nope.cfg")])
        assert rc == 2

    def test_unwritable_output_exit_4(self, sweep_config, tmp_path):
        rc = main(["sweep", "--config", str(sweep_config),
                   "--output", str(tmp_path / "no" / "dir" / "x.csv")])
        assert rc == 4


class TestCmdBounds:
    def test_table_contains_t1(self, capsys):
        rc = main(["bounds", "--delta", "2", "--sigma", "8", "--eta", "1e-8",
                   "--T-grid", "200,429"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0].startswith("T,t1,shb_upper")
        assert len(lines) == 3
        for line in lines[1:]:
            t1 = float(line.split(",")[1])
            assert t1 == pytest.approx(428.8077, abs=0.01)

    def test_eta_out_of_domain_exit_2(self, capsys):
        rc = main(["bounds", "--delta", "2", "--sigma", "8", "--eta", "0.6",
                   "--T-grid", "200"])
        assert rc == 2

    def test_single_point_grid(self, capsys):
        rc = main(["bounds", "--delta", "2", "--sigma", "1", "--eta", "0.1",
                   "--T-grid", "360"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert len(lines) == 2
        cells = lines[1].split(",")
        assert float(cells[4]) == pytest.approx(1.9794e-7, rel=1e-3)
        assert cells[5] == "true"


class TestCmdRepro:
    def test_unknown_preset_exit_2(self, tmp_path, capsys):
        rc = main(["repro", "fig9z", str(tmp_path)])
        assert rc == 2
        assert "unknown preset" in capsys.readouterr().err

    def test_zero_noise_suite_smoke(self, tmp_path):
        rc = main(["repro", "zero-noise-suite", str(tmp_path),
                   "--replications", "2", "--workers", "1"])
        assert rc == 0
        csv_path = tmp_path / "zero-noise-suite.csv"
        lines = csv_path.read_text().strip().split("\n")
        assert len(lines) == 1 + 4 * 5  # four policies, five budgets
        # zero-noise valid cells never fail
        for line in lines[1:]:
            cells = line.split(",")
            if cells[-1] == "true":
                assert float(cells[4]) == 0.0

    def test_fig2bc_writes_two_files(self, tmp_path):
        rc = main(["repro", "fig2bc-sh-only", str(tmp_path),
                   "--replications", "2", "--workers", "2"])
        assert rc == 0
        assert (tmp_path / "fig2bc_xstar_0.7.csv").exists()
        assert (tmp_path / "fig2bc_xstar_0.01.csv").exists()
