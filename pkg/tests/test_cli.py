import csv
import io
import json
import math
import subprocess
import sys

import pytest

from harmonic_spaces.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_ok(capsys):
    code, out, _ = _run(capsys, "eval", "--corpus", "identity", "--functional", "bt_p", "--p", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["value"] == pytest.approx(math.pi, rel=1e-8)
    assert rep["verdict"] == "converged-finite"
    assert rep["inputs"]["source"] == {"corpus": "identity"}
    assert "versions" in rep and "wall_time_s" not in rep


def test_eval_timing_flag(capsys):
    code, out, _ = _run(capsys, "eval", "--corpus", "identity", "--functional", "beta2", "--timing")
    assert code == 0 and json.loads(out)["wall_time_s"] >= 0


def test_eval_divergent_exit_code(capsys):
    code, out, _ = _run(capsys, "eval", "--corpus", "remark3", "--functional", "besov_seminorm_smooth", "--p", "2")
    assert code == 2
    assert json.loads(out)["verdict"] == "divergent-suspect"


@pytest.mark.parametrize("argv", [
    ["eval", "--corpus", "no_such_entry", "--functional", "beta2"],
    ["eval", "--corpus", "identity", "--functional", "no_such_functional"],
    ["eval", "--corpus", "identity", "--functional", "bt_p"],
    ["eval", "--functional", "beta2"],
    ["eval", "--corpus", "identity", "--functional", "bt_p", "--p", "0.5"],
])
def test_eval_errors(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 1
    assert err.startswith("error:")


def test_eval_csv(capsys):
    code, out, _ = _run(capsys, "eval", "--corpus", "identity", "--functional", "I_f", "--p", "2", "--format", "csv")
    rows = _csv(out)
    assert code == 0 and len(rows) == 1
    assert float(rows[0]["value"]) == 0.0


def test_eval_map_file(tmp_path, capsys):
    m = tmp_path / "map.json"
    m.write_text(json.dumps({"h_prime": {"op": "const", "value": [1.0, 0.0]}}))
    code, out, _ = _run(capsys, "eval", "--map", str(m), "--functional", "qt_p_integral", "--p", "2", "--a", "0")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(math.pi / 3, rel=1e-8)


def test_eval_analytic_file(tmp_path, capsys):
    m = tmp_path / "h.json"
    m.write_text(json.dumps({"analytic": {"op": "z"}}))
    code, out, _ = _run(capsys, "eval", "--map", str(m), "--functional", "qp_integral", "--p", "1")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(math.pi / 2, rel=1e-8)


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"corpus": "identity", "functional": "bt_p", "p": 3.0}))
    _, out3, _ = _run(capsys, "eval", "--config", str(cfg))
    _, out2, _ = _run(capsys, "eval", "--config", str(cfg), "--p", "2")
    assert json.loads(out3)["value"] == pytest.approx(math.pi / 2, rel=1e-8)
    assert json.loads(out2)["value"] == pytest.approx(math.pi, rel=1e-8)


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"corpus": "identity", "bogus": 1}))
    code, _, err = _run(capsys, "eval", "--config", str(cfg), "--functional", "beta2")
    assert code == 1 and "bogus" in err


def test_sweep_truncation_grows_for_divergent(capsys):
    code, out, _ = _run(capsys, "sweep", "--corpus", "remark3", "--functional", "besov_seminorm_smooth", "--p", "2",
                        "--axis", "truncation", "--levels", "10")
    rows = _csv(out)
    vals = [float(r["value"]) for r in rows]
    assert code == 2
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 2 * vals[0]


def test_sweep_p(capsys):
    code, out, _ = _run(capsys, "sweep", "--corpus", "identity", "--functional", "bt_p", "--axis", "p",
                        "--values", "2,3")
    rows = _csv(out)
    assert code == 0
    assert float(rows[0]["value"]) == pytest.approx(math.pi, rel=1e-8)
    assert float(rows[1]["value"]) == pytest.approx(math.pi / 2, rel=1e-8)


def test_sweep_a_radius_decays(capsys):
    code, out, _ = _run(capsys, "sweep", "--corpus", "poly_z2", "--functional", "qp_integral", "--p", "1",
                        "--axis", "a-radius", "--values", "0.5,0.75,0.875,0.9375,0.96875", "--format", "json")
    vals = [r["value"] for r in json.loads(out)["rows"]]
    assert code == 0
    assert all(b < a for a, b in zip(vals[1:], vals[2:]))


def test_sweep_rho(capsys):
    code, out, _ = _run(capsys, "sweep", "--corpus", "shear_rho:0.5", "--functional", "h_prime_at", "--z", "0.5",
                        "--axis", "rho", "--values", "0.25,0.5")
    rows = _csv(out)
    assert code == 0
    assert [float(r["value"]) for r in rows] == pytest.approx([1 / (1 - 0.125), 1 / (1 - 0.25)])


def test_verify_filter_passes(capsys):
    code, out, _ = _run(capsys, "verify", "--filter", "C2,C3")
    assert code == 0
    assert [line.split()[:2] for line in out.splitlines()] == [["C2", "PASS"], ["C3", "PASS"]]


def test_verify_tampered_tolerance_fails(capsys, tmp_path):
    summary = tmp_path / "s.json"
    code, out, err = _run(capsys, "verify", "--filter", "C3", "--override", "C3=1e-30", "--out", str(summary))
    assert code == 1
    assert out.split()[:2] == ["C3", "FAIL"]
    assert "C3" in err
    assert json.loads(summary.read_text())["passed"] is False


def test_verify_bad_override(capsys):
    code, _, _ = _run(capsys, "verify", "--filter", "C2", "--override", "C2")
    assert code == 1


def test_corpus_list_and_export(capsys, tmp_path):
    code, out, _ = _run(capsys, "corpus", "list")
    names = [line.split("\t")[0] for line in out.splitlines()]
    assert code == 0 and "sec3_example" in names and "shear_rho:0.5" in names
    code, out, _ = _run(capsys, "corpus", "list", "--functionals")
    assert code == 0 and "beta2" in out
    dest = tmp_path / "e.json"
    code, _, _ = _run(capsys, "corpus", "export", "sec3_example", "--out", str(dest))
    d = json.loads(dest.read_text())
    assert code == 0 and d["label"] == "sec3_example" and d["facts"]


def test_corpus_export_unknown(capsys):
    assert _run(capsys, "corpus", "export", "nope")[0] == 1
    assert _run(capsys, "corpus", "export")[0] == 1


def test_eval_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        dest = tmp_path / f"r{i}.json"
        proc = subprocess.run([sys.executable, "-m", "harmonic_spaces", "eval", "--corpus", "sec3_example",
                               "--functional", "beta2", "--out", str(dest)], capture_output=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1]
