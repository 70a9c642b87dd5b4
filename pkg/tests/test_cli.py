import csv
import io
import json
import math

import pytest

from mubsec.cli import RunConfig, UsageError, build_parser, main, parse_theta_grid, resolve_config
from mubsec.optimizer import SCAN_COLUMNS


def run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


class TestConfig:
    def test_precedence(self, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"dim": 3, "seed": 7, "trials": 4}))
        args = build_parser().parse_args(["scan", "--config", str(cfg_file), "--seed", "9"])
        cfg = resolve_config(args)
        assert (cfg.dim, cfg.seed, cfg.trials, cfg.tol) == (3, 9, 4, 1e-9)

    def test_unknown_key(self, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"dims": 3}))
        assert main(["mub", "--config", str(cfg_file)]) == 2

    def test_command_mismatch(self, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"command": "scan"}))
        assert main(["mub", "--config", str(cfg_file)]) == 2

    @pytest.mark.parametrize("kw", [{"dim": 1}, {"trials": 0}, {"tol": 0.0}, {"format": "xml"}])
    def test_invalid(self, kw):
        with pytest.raises(UsageError):
            RunConfig("verify", **kw)

    def test_argparse_errors_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["bogus"])
        assert exc.value.code == 2


def test_theta_grid():
    assert len(parse_theta_grid(None)) == 32 and parse_theta_grid(None)[-1] == math.pi / 2
    assert list(parse_theta_grid("0,0.5")) == [0.0, 0.5]
    assert len(parse_theta_grid("linspace:0:1:5")) == 5
    with pytest.raises(UsageError):
        parse_theta_grid("linspace:0:1")


class TestVerify:
    def test_smoke(self, tmp_path):
        code, out = run(tmp_path, "verify", "--trials", "1")
        rep = json.loads(out.read_text())
        assert code == 0 and rep["passed"] and all(s["passed"] for s in rep["suites"])
        assert "runtime_s" not in rep["suites"][0]

    def test_corrupted_tolerance(self, tmp_path, capsys):
        code, out = run(tmp_path, "verify", "--trials", "1", "--tol", "1e-30",
                        "--suite", "attack.p0_two_routes", "--suite", "mub.fourier_pairs")
        assert code == 1
        failed = [s["name"] for s in json.loads(out.read_text())["suites"] if not s["passed"]]
        assert "attack.p0_two_routes" in failed
        assert "FAIL attack.p0_two_routes" in capsys.readouterr().err

    def test_unknown_suite(self, tmp_path):
        assert run(tmp_path, "verify", "--suite", "nope")[0] == 2

    def test_timings_and_csv(self, tmp_path):
        code, out = run(tmp_path, "verify", "--trials", "1", "--dim", "2", "--format", "csv",
                        "--timings", "--suite", "mub.prime_sets", name="v.csv")
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert code == 0 and rows[0]["name"] == "mub.prime_sets" and "runtime_s" in rows[0]


class TestScan:
    def test_partial_copy_default_grid(self, tmp_path):
        code, out = run(tmp_path, "scan", "--dim", "2", name="s.csv")
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert code == 0 and len(rows) == 32
        assert tuple(rows[0]) == SCAN_COLUMNS
        assert float(rows[-1]["thm1_bound_bits"]) == pytest.approx(2 * math.sqrt(2), abs=1e-6)

    def test_identity(self, tmp_path):
        code, out = run(tmp_path, "scan", "--attack", "identity", "--dim", "3", "--trials", "2", name="s.csv")
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert code == 0 and len(rows) == 2
        for r in rows:
            for col in ("corollary_bound_bits", "thm1_bound_bits", "povm_info_bits", "holevo_bits"):
                assert abs(float(r[col])) < 1e-9

    def test_deterministic(self, tmp_path):
        _, a = run(tmp_path, "scan", "--attack", "random", "--dim", "2", "--trials", "3", name="a.csv")
        _, b = run(tmp_path, "scan", "--attack", "random", "--dim", "2", "--trials", "3", name="b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_full_precision(self, tmp_path):
        _, out = run(tmp_path, "scan", "--dim", "2", "--theta-grid", "0.3", "--format", "json")
        row = json.loads(out.read_text())["rows"][0]
        from mubsec.attack import builtin_attack, disturbance, extract_kraus_vectors
        from mubsec.mub import fourier_matrix
        exact = disturbance(extract_kraus_vectors(builtin_attack("partial_copy", 2, theta=0.3)),
                            fourier_matrix(2)).p_err_mub
        assert abs(row["p_err_mub"] - exact) <= 1e-12

    @pytest.mark.parametrize("argv", [["--attack", "nope"], ["--theta-grid", "2.0"],
                                      ["--hadamard", "sylvester", "--dim", "3"]])
    def test_bad_family(self, tmp_path, argv):
        assert run(tmp_path, "scan", *argv, name="x.csv")[0] == 2


class TestMub:
    def test_dim3(self, tmp_path):
        code, out = run(tmp_path, "mub", "--dim", "3")
        data = json.loads(out.read_text())
        assert code == 0 and data["header"]["n_bases"] == 4 and len(data["bases"]) == 4
        assert data["header"]["max_unbiasedness_deviation"] < 1e-10
        assert data["bases"][0][0][0] == [1.0, 0.0]

    def test_composite(self, tmp_path):
        code, out = run(tmp_path, "mub", "--dim", "6")
        assert code == 0 and json.loads(out.read_text())["header"]["n_bases"] == 2

    def test_csv_rejected(self, tmp_path):
        assert run(tmp_path, "mub", "--format", "csv")[0] == 2


class TestFm:
    def test_identity_attack(self, tmp_path):
        code, out = run(tmp_path, "fm", "--attack", "identity", "--dim", "3", "--function", "indicator:1")
        rep = json.loads(out.read_text())
        assert code == 0 and abs(rep["exact_cond_info"]) < 1e-12 and abs(rep["bound"]) < 1e-12

    def test_xor_and_table(self, tmp_path):
        code, out = run(tmp_path, "fm", "--dim", "4", "--group", "xor", "--function", "table:0,0,1,1",
                        "--hadamard", "sylvester", "--seed", "3")
        rep = json.loads(out.read_text())
        assert code == 0 and rep["exact_cond_info"] <= rep["bound"] + 1e-9
        assert len(rep["per_announcement_info"]) == 4

    @pytest.mark.parametrize("argv", [["--function", "cube"], ["--attack", "partial_copy"],
                                      ["--group", "xor", "--dim", "3"]])
    def test_bad_inputs(self, tmp_path, argv):
        assert run(tmp_path, "fm", *argv)[0] == 2


class TestReport:
    def test_empty_dir(self, tmp_path):
        (tmp_path / "empty").mkdir()
        assert main(["report", "--inputs", str(tmp_path / "empty")]) == 2

    def test_missing_dir(self, tmp_path):
        assert main(["report", "--inputs", str(tmp_path / "none")]) == 2

    def test_aggregates(self, tmp_path):
        d = tmp_path / "outs"
        main(["mub", "--dim", "2", "--out", str(d / "mub.json")])
        main(["scan", "--dim", "2", "--theta-grid", "0,1", "--out", str(d / "scan.csv")])
        code, out = run(tmp_path, "report", "--inputs", str(d), name="report.json")
        rep = json.loads(out.read_text())
        assert code == 0 and rep["n_files"] == 2
        kinds = {e["file"]: e["kind"] for e in rep["files"]}
        assert kinds == {"mub.json": "mub", "scan.csv": "scan"}
        assert all(len(e["sha256"]) == 64 for e in rep["files"])
