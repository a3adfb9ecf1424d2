import csv
import json
import subprocess
import sys

import pytest

from freeotto.cli import main
from freeotto.sweep import RESULT_COLUMNS, ConfigError, SweepAxis, build_config, read_config_file


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestConfig:
    def test_empty_config_gives_defaults(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# nothing but a comment\n\n")
        c = build_config(read_config_file(cfg))
        p = c.params
        assert (p.h1, p.h2, p.T_H, p.T_C, p.tau1, p.tau2, p.tau_bath) == (10, 0.2, 100, 0.001, 0.1, 0.1, 0.2)
        assert c.spec.J == 1 and c.spec.L == 2 and c.engine == "dense"

    def test_unknown_key_names_line(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("h2 = 0.3\nfield = 2\n")
        with pytest.raises(ConfigError, match=r"run.cfg:2: unknown key 'field'"):
            read_config_file(cfg)

    def test_type_error_names_key(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("L = four\n")
        with pytest.raises(ConfigError, match=r"run.cfg:1: bad value for 'L'"):
            build_config(read_config_file(cfg))

    def test_kspace_ltim_rejected(self):
        with pytest.raises(ConfigError, match="kspace"):
            build_config([("engine", "kspace", "x"), ("model", "LTIM", "y")])

    def test_analytic_needs_two_spins(self):
        with pytest.raises(ConfigError):
            build_config([("engine", "analytic2spin", "x"), ("L", "4", "y")])

    def test_sweep_cardinality(self):
        c = build_config([("sweep", "h2:0.1:2.0:20", "x")])
        assert len(list(c.cells())) == 20

    def test_too_many_axes(self):
        with pytest.raises(ConfigError):
            build_config([("sweep", s, "--sweep") for s in ("h2=0.1", "L=2", "tau_k=0")])

    @pytest.mark.parametrize("text", ["h1:0:1:3", "h2:0:1", "L=2.5", "h2:0:1:0", "tau_k="])
    def test_bad_axes(self, text):
        with pytest.raises(ConfigError):
            SweepAxis.parse(text)

    def test_sweep_over_L_checks_compatibility(self):
        with pytest.raises(ConfigError):
            build_config([("engine", "kspace", "x"), ("sweep", "L=4,5", "y")])


def run_cli(*args):
    return main(list(args))


class TestCommands:
    def test_cycle(self, capsys):
        assert run_cli("cycle") == 0
        out = capsys.readouterr().out
        assert "W = -2.98129753772" in out and "is_engine = true" in out

    def test_usage_error(self, capsys):
        assert run_cli("cycle", "--engine", "kspace", "--model", "LTIM") == 1
        assert "TIM only" in capsys.readouterr().err

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("cycle", "--nope", "1")
        assert exc.value.code == 1

    def test_flags_override_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("h2 = 0.3\nL = 4\n")
        out = tmp_path / "one.csv"
        assert run_cli("cycle", "--config", str(cfg), "--h2", "0.4", "--out", str(out)) == 0
        (row,) = read_rows(out)
        manifest = json.loads((tmp_path / "one.csv.manifest.json").read_text())
        assert manifest["config"]["h2"] == 0.4 and manifest["config"]["L"] == 4
        assert float(row["W"]) < 0

    def test_sweep_csv_and_manifest(self, tmp_path):
        out = tmp_path / "s.csv"
        code = run_cli("sweep", "--sweep", "h2:0.1:0.5:3", "--sweep", "L=2,4", "--optimize-tau-k", "--out", str(out))
        assert code == 0
        rows = read_rows(out)
        assert list(rows[0]) == ["h2", "L", *RESULT_COLUMNS]
        assert [(r["h2"], r["L"]) for r in rows] == [(h, L) for h in ("0.1", "0.3", "0.5") for L in ("2", "4")]
        assert all(r["tau_k"] == r["tau_k_opt"] != "" for r in rows)
        assert all(float(r["abs_W"]) == abs(float(r["W"])) for r in rows)
        m = json.loads((tmp_path / "s.csv.manifest.json").read_text())
        for key in ("config", "version", "integrator", "wall_time_s", "timestamp"):
            assert key in m
        assert m["n_records"] == 6

    def test_sweep_is_deterministic_and_parallel_safe(self, tmp_path):
        args = ["sweep", "--sweep", "tau_k:0:0.6:4", "--sweep", "h2=0.2,0.4"]
        assert run_cli(*args, "--out", str(tmp_path / "a.csv")) == 0
        assert run_cli(*args, "--out", str(tmp_path / "b.csv"), "--workers", "2") == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_partial_failure(self, tmp_path):
        out = tmp_path / "p.csv"
        assert run_cli("sweep", "--sweep", "L=2,13", "--out", str(out)) == 3
        rows = read_rows(out)
        assert rows[0]["status"] == "ok" and rows[1]["status"].startswith("error")
        assert rows[1]["W"] == ""

    def test_scan(self, tmp_path):
        out = tmp_path / "scan.csv"
        assert run_cli("scan-tauk", "--grid-points", "16", "--out", str(out)) == 0
        assert len(read_rows(out)) == 16
        m = json.loads((tmp_path / "scan.csv.manifest.json").read_text())
        assert m["tau_k_opt"] == pytest.approx(0.286, abs=0.01)

    def test_validate(self, capsys):
        assert run_cli("validate", "--L", "4") == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and "kspace vs dense W" in out

    def test_convergence_flag(self, capsys):
        assert run_cli("cycle", "--check-convergence") == 0
        assert "status = ok" in capsys.readouterr().out

    def test_convergence_failure_exit_code(self, capsys):
        assert run_cli("cycle", "--dt-max", "0.05", "--scheme", "midpoint", "--check-convergence") == 2

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "freeotto", "cycle", "--engine", "analytic2spin"],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and "E_A" in proc.stdout
