import json
import subprocess
import sys


from qholonomic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_phi_and_inverse(capsys):
    code, out = run(capsys, "phi", "(1,0)")
    assert code == 0 and out["status"] == "PASS"
    assert out["result"]["text"] == "-E - E^(-1)"
    code, out = run(capsys, "phi", "--inverse", out["result"]["text"])
    assert out["result"]["text"] == "(1,0)"


def test_skein_product(capsys):
    code, out = run(capsys, "mul", "(1,0)", "(1,0)", "--ring", "skein")
    assert out["result"]["text"] == "(2,0) + 2*(0,0)"


def test_verify_trefoil_finds_convention(capsys, cache_dir):
    code, out = run(capsys, "verify", "gelca:1", "--braid", "trefoil", "--range=-4..4", "--full", "--cache-dir", cache_dir)
    assert code == 0
    assert out["result"]["reduced"]["convention"] == {"gelca_variable": True, "mirror": True, "shift": 0, "sign": False}
    assert out["result"]["full"]["passed"]


def test_verify_explicit_convention_failure_exit_code(capsys, cache_dir):
    code, out = run(capsys, "verify", "gelca:1", "--braid", "trefoil", "--range=1..3", "--gelca-t", "--cache-dir", cache_dir)
    assert code == 1 and out["status"] == "FAIL"


def test_hierarchy_and_solve(capsys):
    code, out = run(capsys, "hierarchy", "E - q^2", "--order", "3")
    assert (out["result"]["l"], out["result"]["d"]) == (1, 1)
    code, out = run(capsys, "solve", "E - q^2", "--seeds", "1;0;0;0")
    assert code == 0
    assert out["result"]["jets"][0] == ["1", "2", "1", "0", "0"]


def test_extract_with_operator_check(capsys, cache_dir):
    code, out = run(capsys, "extract", "--braid", "trefoil", "--mirror", "--range", "1..12",
                    "--check-operator", "gelca:1", "--gelca-t", "--cache-dir", cache_dir)
    assert code == 0
    assert out["result"]["jets"][0] == ["1", "0", "-1", "1", "0"]


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"loops": 1, "jet_order": 2}))
    code, out = run(capsys, "solve", "E - q^2", "--seeds", "1;0;0", "--config", str(cfg), "--loops", "2")
    assert out["config"]["loops"] == 2 and out["config"]["jet_order"] == 2
    assert len(out["result"]["jets"]) == 3


def test_error_exit_codes(capsys):
    assert run(capsys, "phi", "(1,")[0] == 2
    assert run(capsys, "oracle", "--braid", "torus:9")[0] == 3
    assert run(capsys, "solve", "E - q^2", "--seeds", "x")[0] == 2
    code, out = run(capsys, "phi", "--inverse", "E")
    assert code == 1 and out["reason"]["kind"] == "NotEven"


def test_output_file_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["hierarchy", "gelca:1", "--gelca-t", "--normalize", "--output", str(a)])
    main(["hierarchy", "gelca:1", "--gelca-t", "--normalize", "--output", str(b)])
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert ra["config"].pop("output") != rb["config"].pop("output")
    assert ra == rb and ra["result"]["regular"] is True


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qholonomic", "phi", "gelca-skein:1"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["status"] == "PASS"
