import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from mupolab.cli import CSV_COLUMNS, main, read_csv, read_manifest
from mupolab.config import load_spec, spec_from_flat, spec_to_flat
from mupolab.errors import ConfigError

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


def test_load_sticky_config():
    spec, flat = load_spec(CONFIGS / "triangular_sticky.yaml")
    assert spec.rho == pytest.approx(math.cos(0.3484 * math.pi), rel=1e-15)
    assert spec.stem.kind == "triangular"
    assert spec.hole.eps == pytest.approx(0.048)
    assert flat["theta_star"] == "871/2500"


def test_json_config_and_roundtrip(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"R": 2.0, "r": 1.0, "stem": {"kind": "rectangular", "L": 1.5}}))
    spec, _ = load_spec(p)
    assert spec.rho == 0.5 and spec.L == 1.5
    assert spec_from_flat(spec_to_flat(spec)) == spec


@pytest.mark.parametrize("text,msg", [
    ("rho: 0.5\nbogus: 1\n", "unknown"),
    ("rho: 0.5\nr: 0.5\n", "either"),
    ("R: 1\n", "r or rho"),
    ("rho: 1.5\n", "r < R"),
    ("rho: abc\n", "parse"),
    ("rho: 0.5\nhole:\n  wall: RectStemRightWall\n  lo: 0.1\n", "hole"),
    ("- 1\n- 2\n", "mapping"),
    ("rho: [\n", "malformed"),
])
def test_bad_configs(tmp_path, text, msg):
    p = tmp_path / "bad.yaml"
    p.write_text(text)
    with pytest.raises(ConfigError, match=msg):
        load_spec(p)


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_mupos_command(capsys):
    code, out, _ = run(["mupos", "--rho", "0.815", "--s-max", "919"], capsys)
    assert code == 0
    res = json.loads(out)
    assert [(d["s"], d["j"]) for d in res] == [(4, 1), (5, 1), (66, 13)]


def test_mupos_generalized_alpha(capsys):
    code, out, _ = run(["mupos", "--rho", "0.815", "--s-max", "50", "--alpha", "1/3"], capsys)
    assert code == 0
    assert all({"p", "q", "border"} <= set(d) for d in json.loads(out))


@pytest.mark.parametrize("ts,kind", [("871/2500", "FinitelySticky"), ("(5+sqrt(2))/23", "MupoFreeCertified"),
                                     ("(sqrt(5)-1)/4", "InfinitelySticky")])
def test_classify_command(capsys, ts, kind):
    code, out, _ = run(["classify", "--theta-star", ts], capsys)
    assert code == 0 and json.loads(out)["kind"] == kind


def test_classify_needs_exact(capsys):
    code, _, err = run(["classify", "--theta-star", "0.3484"], capsys)
    assert code == 2 and json.loads(err)["error"] == "ConfigError"


def test_predict_sticky(tmp_path, capsys):
    out = tmp_path / "pred.csv"
    code, _, _ = run(["predict", "--config", str(CONFIGS / "triangular_sticky.yaml"), "--out", str(out),
                      "--t-max", "1e7"], capsys)
    assert code == 0
    data = read_csv(out, "predict")
    header = json.loads(Path(str(out) + ".json").read_text())
    tp = data["t"] * data["Pe_total"]
    assert tp[-1] == pytest.approx(header["C"], rel=1e-6)
    assert header["C"] == pytest.approx(0.01646, rel=1e-3)
    assert np.allclose(data["Pe_exponential"] + data["Pe_powerlaw"], data["Pe_total"], rtol=1e-9)
    m = read_manifest(str(out) + ".manifest.json")
    assert m["command"] == "predict" and str(out) in m["artifacts"]


def test_predict_combined_rectangular(tmp_path, capsys):
    out = tmp_path / "p.csv"
    code, _, _ = run(["predict", "--config", str(CONFIGS / "rectangular_bouncing.yaml"), "--out", str(out)],
                     capsys)
    assert code == 0
    header = json.loads(Path(str(out) + ".json").read_text())
    assert header["source"] == "Combined" and header["hat_C"] == 0.0
    assert header["C"] == pytest.approx(0.19582, rel=1e-4)
    assert header["ordering"] == "Tilde"


def test_simulate_and_threads(tmp_path):
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"sim{threads}.csv"
        env = dict(os.environ, MUPOLAB_THREADS=threads)
        r = subprocess.run([sys.executable, "-m", "mupolab", "simulate", "--config",
                            str(CONFIGS / "rectangular_bouncing.yaml"), "--particles", "3000", "--t-max", "300",
                            "--bins", "12", "--seed", "4", "--out", str(out)], env=env, capture_output=True,
                           text=True)
        assert r.returncode == 0, r.stderr
        outs.append(out.read_bytes())
        d = read_csv(out, "simulate")
        assert np.all(np.diff(d["survivors"]) <= 0)
    assert outs[0] == outs[1]


def test_phase_command(tmp_path, capsys):
    out = tmp_path / "ph.csv"
    code, _, _ = run(["phase", "--rho", "0.815", "--N", "30", "--samples", "20000", "--out", str(out)], capsys)
    assert code == 0
    d = read_csv(out, "phase")
    assert d["phi"].size > 0 and np.all(d["sin_theta"] <= 0.815)


def test_verify_command_fast_check(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, _, _ = run(["verify", "--only", "1,4", "--out", str(out)], capsys)
    rep = json.loads(out.read_text())
    assert code == 0 and [r["number"] for r in rep] == [1, 4] and all(r["passed"] for r in rep)


def test_bad_config_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("rho: 0.5\nnope: 1\n")
    code, _, err = run(["predict", "--config", str(p)], capsys)
    assert code == 2
    e = json.loads(err)
    assert e["error"] == "ConfigError" and "nope" in e["message"]


def test_missing_rho(capsys):
    code, _, err = run(["mupos", "--s-max", "10"], capsys)
    assert code == 2 and "rho" in json.loads(err)["message"]


def test_csv_validator_rejects_bad_header(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError):
        read_csv(p, "phase")
    assert CSV_COLUMNS["simulate"][0] == "t_lo"
