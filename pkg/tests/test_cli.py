import json
import subprocess
import sys

import numpy as np
import pytest

from corrdyn.cli import main, parse_box, parse_complex, parse_size
from corrdyn.imaging import read_csv, read_ppm

FAST = ["--size", "32", "--walkers", "200", "--budget", "120", "--transient", "20"]


def run_json(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), (json.loads(err) if err.strip() else None)


def test_argument_parsers():
    assert parse_complex("1,2") == 1 + 2j
    assert parse_complex("1+2j") == 1 + 2j
    assert parse_complex("-0.5") == -0.5
    assert parse_box("-1,-2,3,4") == (-1 - 2j, 3 + 4j)
    assert parse_size("64") == (64, 64)
    assert parse_size("64x32") == (64, 32)


def test_render_writes_image_csv_and_sidecar(tmp_path, capsys):
    out = tmp_path / "r.ppm"
    csv = tmp_path / "r.csv"
    code, summary, _ = run_json(capsys, ["render", "--out", str(out), "--csv", str(csv), *FAST])
    assert code == 0
    assert read_ppm(out).shape == (32, 32, 3)
    pts, prov = read_csv(csv)
    assert pts.size > 0 and "config" in prov
    side = json.loads((tmp_path / "r.ppm.json").read_text())
    assert side["config"]["raster"]["width"] == 32 and "numpy" in side["versions"]
    assert summary["summary"]["fractions"]["Omega"] > 0


def test_sidecar_replay_is_byte_identical(tmp_path, capsys):
    first = tmp_path / "a.png"
    assert run_json(capsys, ["render", "--out", str(first), "--threads", "1", *FAST])[0] == 0
    second = tmp_path / "b.png"
    code, _, _ = run_json(capsys, ["render", "--config", str(tmp_path / "a.png.json"), "--out", str(second), "--threads", "3"])
    assert code == 0
    assert first.read_bytes() == second.read_bytes()


def test_no_sidecar(tmp_path, capsys):
    out = tmp_path / "r.ppm"
    run_json(capsys, ["render", "--out", str(out), "--no-sidecar", *FAST])
    assert not (tmp_path / "r.ppm.json").exists()


def test_scan_csv(tmp_path, capsys):
    csv = tmp_path / "s.csv"
    code, _, _ = run_json(capsys, ["scan", "--size", "16x8", "--csv", str(csv)])
    assert code == 0
    rows = np.loadtxt(csv, delimiter=",", comments="#")
    assert rows.shape == (128, 4)


def test_sturmian_summary(capsys):
    code, out, _ = run_json(capsys, ["sturmian", "--pq", "1/3"])
    s = out["summary"]
    assert code == 0 and s["word"] == "001"
    assert {a: b for a, b in s["pairing"]} == {"010": "100", "100": "010", "001": "001"}
    assert s["image_arcs"] == {"concentric": 1, "spike": 1}


def test_kleinian_pinch(tmp_path, capsys):
    out = tmp_path / "k.csv"
    code, res, _ = run_json(capsys, ["kleinian", "--pinch", "1/2", "--samples", "2000", "--out", str(out)])
    assert code == 0
    assert res["summary"]["solve"]["residual"] < 1e-10
    assert res["summary"]["circle_fit_deviation"] < 1e-4
    assert read_csv(out)[0].size == 2000


def test_kleinian_modular(capsys):
    code, res, _ = run_json(capsys, ["kleinian", "--modular", "--samples", "100"])
    assert code == 0 and res["summary"]["jorgensen_heuristic"] == pytest.approx(1.0)


def test_pinch_demo(tmp_path, capsys):
    out, img = tmp_path / "p.csv", tmp_path / "p.ppm"
    code, res, _ = run_json(capsys, ["pinch-demo", "--out", str(out), "--image", str(img), "--nt", "20", "--ny", "10"])
    assert code == 0
    assert res["summary"]["max_abs_mu_identity_strip"] == 0
    assert read_ppm(img).shape == (10, 20, 3)


def test_verify_suite(capsys):
    code, res, _ = run_json(capsys, ["verify", "--suite", "sturmian"])
    assert code == 0 and res["summary"]["passed"]


@pytest.mark.parametrize(
    "argv, exit_code, error",
    [
        (["render", "--viewport", "1,1,-1,-1"], 2, "ConfigInvalid"),
        (["render", "--a", "1,0"], 2, "ParameterDegenerate"),
        (["kleinian", "--param", "0,0"], 2, "DegenerateCrossRatio"),
        (["kleinian", "--pinch", "0/1", "--initial", "1,0"], 3, "NoConvergence"),
        (["verify", "--suite", "nope"], 2, "UnknownSuite"),
        (["sturmian", "--pq", "1/0"], 2, "ConfigInvalid"),
    ],
)
def test_errors_are_json_with_exit_codes(capsys, argv, exit_code, error):
    code, out, err = run_json(capsys, argv)
    assert code == exit_code and out is None
    assert err["error"] == error and err["exit_code"] == exit_code


def test_config_for_other_command_rejected(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "scan"}))
    code, _, err = run_json(capsys, ["render", "--config", str(cfg)])
    assert code == 2 and err["field"] == "command"


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "corrdyn.cli", "sturmian", "--pq", "2/5"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["summary"]["word"] == "00101"


def test_negative_boxes_attach_with_equals(tmp_path, capsys):
    out = tmp_path / "r.ppm"
    code, _, _ = run_json(capsys, ["render", "--viewport=-0.5,-0.5,0.5,0.5", "--out", str(out), *FAST])
    assert code == 0
    side = json.loads((tmp_path / "r.ppm.json").read_text())
    assert side["config"]["raster"]["lower_left"] == [-0.5, -0.5]
