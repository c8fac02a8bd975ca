import csv
import json
import subprocess
import sys

import pytest

from wsncov.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == EXIT_OK and out else None), err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestCoverage:
    def test_boolean_default_model(self, capsys):
        code, doc, _ = run(capsys, "coverage", "--rs", "50", "--nodes", "1000")
        assert code == EXIT_OK
        assert doc["result"]["value"] == pytest.approx(0.9181715436000221628763, rel=1e-12)
        assert doc["model"] == {"model": "boolean", "r_s": 50.0}

    def test_elfes_approx(self, capsys):
        code, doc, _ = run(capsys, "coverage", "--model", "elfes", "--r1", "0", "--rmax", "50",
                           "--lambda", "0.01", "--nodes", "2000", "--mode", "approx")
        assert doc["result"]["value"] == pytest.approx(0.9728983432219013, rel=1e-12)

    def test_shadow_confidence(self, capsys):
        code, doc, _ = run(capsys, "coverage", "--model", "shadow", "--rs", "50", "--n", "2",
                           "--sigma", "8", "--nodes", "1000", "--shadow-mode", "confidence")
        assert doc["result"]["value"] == pytest.approx(0.21014980103230585, rel=1e-12)

    def test_sensing_budget(self, capsys):
        code, doc, _ = run(capsys, "coverage", "--ps", "0", "--ps-th", "-60", "--pl-ref", "40",
                           "--x0", "1", "--n", "2", "--nodes", "10")
        assert code == EXIT_OK
        assert doc["model"]["r_s"] == pytest.approx(10.0)

    def test_flag_for_other_model_rejected(self, capsys):
        code, _, err = run(capsys, "coverage", "--rs", "50", "--lambda", "0.1", "--nodes", "5")
        assert code == EXIT_USAGE and "--lambda" in err

    def test_inner_radius_above_outer(self, capsys):
        code, _, err = run(capsys, "coverage", "--model", "elfes", "--r1", "60", "--rmax", "50",
                           "--lambda", "0.01", "--nodes", "5")
        assert code == EXIT_USAGE and "--r1 60 exceeds --rmax 50" in err

    def test_epsilon_needs_confidence_mode(self, capsys):
        code, _, err = run(capsys, "coverage", "--model", "shadow", "--rs", "50", "--n", "2",
                           "--sigma", "8", "--nodes", "5", "--epsilon", "0.9")
        assert code == EXIT_USAGE and "--epsilon" in err

    def test_missing_nodes(self, capsys):
        code, _, err = run(capsys, "coverage", "--rs", "50")
        assert code == EXIT_USAGE and "--nodes" in err

    def test_argparse_errors_exit_one(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["coverage", "--nodes", "ten"])
        assert info.value.code == EXIT_USAGE

    def test_config_file_and_override(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"rs": 50, "nodes": 1000}))
        _, doc, _ = run(capsys, "coverage", "--config", str(cfg))
        assert doc["result"]["value"] == pytest.approx(0.9181715436000222, rel=1e-12)
        _, doc, _ = run(capsys, "coverage", "--config", str(cfg), "--nodes", "500")
        assert doc["config"]["nodes"] == 500

    def test_config_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"rs": 50, "bogus": 1}))
        code, _, err = run(capsys, "coverage", "--config", str(cfg), "--nodes", "4")
        assert code == EXIT_USAGE and "bogus" in err

    def test_config_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "coverage", "--config", str(tmp_path / "none.json"))
        assert code in (EXIT_USAGE, EXIT_IO)


class TestLink:
    def test_probability(self, capsys):
        _, doc, _ = run(capsys, "link", "--r0", "100", "--n", "3", "--sigma", "4", "--d", "120")
        assert doc["result"]["probability"] == pytest.approx(0.27630309622743861, abs=1e-12)

    def test_budget(self, capsys):
        _, doc, _ = run(capsys, "link", "--pt", "0", "--prth", "-70", "--pl-ref-link", "40",
                        "--d0", "1", "--n", "2", "--sigma", "4", "--d", "10")
        assert doc["link_model"]["R_0"] == pytest.approx(31.622776601683793)

    def test_requires_distance(self, capsys):
        code, _, err = run(capsys, "link", "--r0", "100", "--n", "3", "--sigma", "4")
        assert code == EXIT_USAGE and "--d" in err


class TestFigures:
    def test_figure6_schema_and_values(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("WSNCOV_OUTPUT_DIR", str(tmp_path))
        code, doc, _ = run(capsys, "figure6")
        rows = read_csv(tmp_path / "figure6.csv")
        assert code == EXIT_OK and doc["rows"] == len(rows) == 5 * 296
        assert list(rows[0]) == ["d_over_R0", "curve", "probability"]
        r = next(r for r in rows if r["curve"] == "d" and float(r["d_over_R0"]) == 1.2)
        assert float(r["probability"]) == pytest.approx(0.27630309622743861, abs=1e-12)

    def test_figure5_schema(self, capsys, tmp_path):
        out = tmp_path / "f5.csv"
        code, doc, _ = run(capsys, "figure5", "--output", str(out), "--nodes-stop", "1000")
        rows = read_csv(out)
        assert code == EXIT_OK and list(rows[0]) == ["N", "curve", "coverage"]
        assert {r["curve"] for r in rows} == {"a", "b-expected", "b-confidence", "c",
                                              "d-expected", "d-confidence", "e", "f"}
        assert len(rows) == 8 * 10
        assert all(0 <= float(r["coverage"]) <= 1 for r in rows)

    def test_unwritable_output(self, capsys, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        code, _, err = run(capsys, "figure6", "--output", str(blocker / "sub" / "f.csv"))
        assert code == EXIT_IO

    def test_bad_grid(self, capsys):
        code, _, _ = run(capsys, "figure5", "--nodes-start", "500", "--nodes-stop", "100")
        assert code == EXIT_USAGE


class TestSimulate:
    ARGS = ("simulate", "--rs", "50", "--nodes", "500", "--trials", "20", "--events", "100")

    def test_coverage_result_and_analytic(self, capsys):
        code, doc, _ = run(capsys, *self.ARGS)
        assert code == EXIT_OK
        assert set(doc["result"]) == {"mean", "half_width_95", "trials_used", "successes", "samples"}
        assert doc["event_margin"] == 50.0
        assert "value" in doc["analytic"]

    def test_byte_identical_across_workers(self, capsys):
        main(list(self.ARGS) + ["--workers", "1"])
        a = capsys.readouterr().out
        main(list(self.ARGS) + ["--workers", "4"])
        b = capsys.readouterr().out
        assert a == b

    def test_per_trial_csv(self, capsys, tmp_path):
        out = tmp_path / "trials.csv"
        run(capsys, *self.ARGS, "--per-trial-csv", str(out))
        rows = read_csv(out)
        assert len(rows) == 20 and list(rows[0]) == ["trial_index", "successes", "events"]

    def test_margin_too_large(self, capsys):
        code, _, err = run(capsys, "simulate", "--rs", "50", "--radius", "40", "--nodes", "3")
        assert code == EXIT_USAGE and "--margin" in err

    def test_link_target(self, capsys):
        code, doc, _ = run(capsys, "simulate", "--target", "link", "--r0", "100", "--n", "2",
                           "--sigma", "8", "--d", "200", "--samples", "1000")
        assert doc["result"]["successes"] == 217
        assert doc["analytic"]["probability"] == pytest.approx(0.2258526758945226, abs=1e-12)

    def test_link_target_rejects_sensing_flags(self, capsys):
        code, _, err = run(capsys, "simulate", "--target", "link", "--r0", "100", "--n", "2",
                           "--sigma", "8", "--d", "200", "--rs", "50")
        assert code == EXIT_USAGE and "--rs" in err

    def test_coverage_target_rejects_link_flags(self, capsys):
        code, _, err = run(capsys, *self.ARGS, "--d", "3")
        assert code == EXIT_USAGE and "--d" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wsncov", "link", "--r0", "1", "--n", "2",
                           "--sigma", "0", "--d", "0.5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["probability"] == 1.0
