import json
import subprocess
import sys


from drinfeld_forms.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_carlitz_example(capsys):
    code, out, _ = run(capsys, "carlitz", "--a", "T^2", "--q", "2")
    assert code == 0
    res = json.loads(out)
    assert res["coefficients"] == ["T^2", "T^2+T", "1"]
    assert res["degrees"] == [2, 2, 0]


def test_spectrum_and_polygon(capsys):
    code, out, _ = run(capsys, "spectrum", "--r", "3", "--x", "1,1,0", "--len", "6", "--format", "csv")
    assert code == 0 and out == "0,1,1,1,2,2\n"
    code, out, _ = run(capsys, "np", "--spectrum", "0,1", "--q", "3")
    poly = json.loads(out)["polygon"]
    code, out, _ = run(capsys, "np", "--vertices",
                       ",".join(f"{a}:{b}" for a, b in poly["vertices"]), "--q", "3")
    assert code == 0 and json.loads(out)["spectrum"] == ["0", "1"]


def test_wk_csv(capsys):
    code, out, _ = run(capsys, "wk", "--r", "2", "--k", "1", "--box", "5", "--format", "csv")
    assert code == 0 and out == "n1\n0\n"


def test_frame_file_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "fiber", "--x", "3/2,0", "--count", "2", "--q", "3", "--e", "2")
    res = json.loads(out)
    assert code == 0 and res["constant"]
    path = tmp_path / "frame.json"
    path.write_text(json.dumps(res["frames"][0]))
    code, out, _ = run(capsys, "map", "--frame", str(path), "--q", "3", "--e", "2")
    assert code == 0 and json.loads(out)["point"] == ["3/2", "0"]


def test_forms_and_eisenstein_routes(capsys):
    common = ["--x", "1,0", "--q", "3", "--prec", "60", "--seed", "5"]
    code, out, _ = run(capsys, "eisenstein", "--k", "2", *common)
    assert code == 0
    exp_route = json.loads(out)["value"]
    code, out, _ = run(capsys, "eisenstein", "--k", "2", "--d", "3", *common)
    direct = json.loads(out)["value"]
    assert exp_route["log"] == direct["log"] == "0"
    code, _, err = run(capsys, "eisenstein", "--k", "3", *common)
    assert code == 2 and json.loads(err)["error"]


def test_converge_csv(capsys):
    code, out, _ = run(capsys, "converge", "--x", "2,0", "--k", "2", "--degrees", "2,3",
                       "--q", "2", "--format", "csv")
    lines = out.strip().split("\n")
    assert code == 0 and lines[0] == "d,v_diff,v_carlitz" and len(lines) == 3


def test_exit_codes(capsys):
    code, _, err = run(capsys, "carlitz", "--a", "T", "--q", "6")
    assert code == 2 and "error" in json.loads(err)
    code, _, _ = run(capsys, "nosuchcommand")
    assert code == 2
    code, _, _ = run(capsys, "carlitz", "--a", "import os", "--q", "2")
    assert code == 2
    code, out, _ = run(capsys, "np", "--vertices", "1:0,5:1", "--q", "3")
    assert code == 1 and json.loads(out)["error"]
    code, out, _ = run(capsys, "converge", "--x", "1,0", "--k", "2", "--degrees", "2", "--q", "2")
    assert code == 1 and json.loads(out)["error"]


def test_config_file_and_out(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"q": 3, "format": "json"}))
    monkeypatch.setenv("DRINFELD_FORMS_CONFIG", str(cfg))
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "carlitz", "--a", "T^3", "--out", str(target))
    assert code == 0 and out == ""
    res = json.loads(target.read_text())
    assert res["coefficients"][-1] == "1" and len(res["coefficients"]) == 4
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, _ = run(capsys, "carlitz", "--a", "T")
    assert code == 2


def test_verify_is_deterministic(capsys):
    outputs = []
    for _ in range(2):
        code, out, _ = run(capsys, "verify", "carlitz-valuations", "--seed", "7")
        assert code == 0
        outputs.append(out)
    assert outputs[0] == outputs[1]
    report = json.loads(outputs[0])
    assert report["seed"] == 7 and report["passed"]
    code, out, _ = run(capsys, "verify", "polygon-invariance", "--seed", "3", "--format", "csv")
    assert code == 0 and out.startswith("suite,check,result\n")


def test_verify_reports_unattainable_k1(capsys):
    code, out, _ = run(capsys, "verify", "carlitz-ratio-limit")
    assert code == 1
    checks = json.loads(out)["suites"][0]["checks"]
    assert [(c["name"], c["passed"]) for c in checks] == [
        ("q=2 k=1", False), ("q=2 k=2", True), ("q=2 k=3", True),
        ("q=3 k=1", False), ("q=3 k=2", True), ("q=3 k=3", True)]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "drinfeld_forms", "carlitz", "--a", "T", "--q", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["coefficients"] == ["T", "1"]
