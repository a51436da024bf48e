import csv
import io
import json

import numpy as np
import pytest

from greymap import cli
from greymap.scenarios import ScenarioId, builtin, load_model


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_civil_fggcm(capsys):
    code, out, err = run_cli(capsys, "simulate", "--scenario", "civil", "--engine", "fggcm", "--lambda", "0.2")
    assert code == 0
    assert err.strip().startswith("behavior=FixedPoint settle_step=")
    rows = list(csv.DictReader(io.StringIO(out)))
    last = max(int(r["step"]) for r in rows)
    final = [r for r in rows if int(r["step"]) == last]
    assert len(final) == 7
    assert all(abs(float(r["kernel"])) < 1e-4 for r in final)
    assert all(abs(float(r["greyness"]) - 0.01) < 1e-3 for r in final)


def test_simulate_web_fcm_cycle_to_file(capsys, tmp_path):
    p = tmp_path / "trace.csv"
    code, out, _ = run_cli(capsys, "simulate", "--scenario", "web", "--engine", "fcm", "--lambda", "4", "--out", str(p))
    assert code == 0
    assert out.strip() == "behavior=LimitCycle settle_step=" + out.split("settle_step=")[1].split()[0] + " period=2"
    assert p.read_text().splitlines()[0] == "step,node,kernel,greyness"


def test_trace_uses_twelve_significant_digits(capsys):
    _, out, _ = run_cli(capsys, "simulate", "--scenario", "web", "--engine", "fcm", "--lambda", "1", "--steps", "2")
    row = out.splitlines()[8]  # step 1, node 1
    digits = row.split(",")[2].replace(".", "").replace("-", "").lstrip("0")
    assert len(digits) <= 12


def test_single_node_zero_weight_model(capsys, tmp_path):
    p = tmp_path / "one.json"
    p.write_text(json.dumps({"name": "one", "activation": {"kind": "sigmoid"},
                             "weights": [[0]], "initial_state": [0.3]}))
    code, out, err = run_cli(capsys, "simulate", "--model", str(p), "--engine", "fcm", "--lambda", "1")
    assert code == 0
    assert "behavior=FixedPoint settle_step=1" in err
    assert "1,1,0.5,0" in out.splitlines()


def test_exit_codes(capsys, tmp_path):
    code, _, err = run_cli(capsys, "simulate", "--scenario", "web-case2", "--engine", "fgcm", "--lambda", "1")
    assert code == 3 and "fgcm" in err
    with pytest.raises(SystemExit) as exc:
        cli.main(["simulate", "--scenario", "web", "--lambda", "-1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["simulate", "--scenario", "web", "--model", "x.json", "--lambda", "1"])
    assert exc.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = run_cli(capsys, "analyze", "--model", str(bad))
    assert code == 2 and "bad.json:1:" in err
    code, _, _ = run_cli(capsys, "analyze", "--model", str(tmp_path / "missing.json"))
    assert code == 2


def test_env_overrides_horizon(capsys, monkeypatch):
    monkeypatch.setenv("GREYMAP_MAX_STEPS", "3")
    _, out, _ = run_cli(capsys, "simulate", "--scenario", "web", "--engine", "fcm", "--lambda", "4")
    assert max(int(l.split(",")[0]) for l in out.splitlines()[1:]) == 3
    monkeypatch.setenv("GREYMAP_MAX_STEPS", "lots")
    code, _, _ = run_cli(capsys, "simulate", "--scenario", "web", "--engine", "fcm", "--lambda", "4")
    assert code == 2


def test_analyze_web(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--scenario", "web")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and out.splitlines()[0] == (
        "lambda,norm_kernel,norm_wstar,lhs_times_lambda,kernel_verdict,mtilde_norm,greyness_verdict,behavior")
    got = [float(r["lhs_times_lambda"]) for r in rows]
    assert np.allclose(got, [3.0586, 6.1172, 12.2344, 24.4688], atol=1e-4)


def test_analyze_civil_and_case1(capsys):
    _, out, _ = run_cli(capsys, "analyze", "--scenario", "civil")
    got = [float(r["lhs_times_lambda"]) for r in csv.DictReader(io.StringIO(out))]
    assert np.allclose(got, [0.4750, 0.9499, 3.5623, 5.9372], atol=1e-4)
    _, out, _ = run_cli(capsys, "analyze", "--scenario", "web-case1", "--lambdas", "0.5,1")
    assert all(r["norm_wstar"] == "-" for r in csv.DictReader(io.StringIO(out)))
    _, out, _ = run_cli(capsys, "analyze", "--scenario", "web", "--lambdas", "0.5", "--format", "kv")
    assert "kernel_verdict=UniqueFixedPoint" in out


def test_reproduce_t2_layout(capsys):
    _, out, _ = run_cli(capsys, "reproduce", "T2")
    lines = out.splitlines()
    assert lines[0] == "matrix,lambda=0.5,lambda=1,lambda=2,lambda=4"
    assert lines[1] == "W_web,3.0680,6.1359,12.2719,24.5437"
    assert len(lines) == 6


def test_reproduce_behaviors_has_eight_rows(capsys):
    _, out, _ = run_cli(capsys, "reproduce", "behaviors")
    assert len(out.splitlines()) == 9


def test_inject_grey_round_trip(capsys, tmp_path):
    p = tmp_path / "civil.json"
    code, _, _ = run_cli(capsys, "inject-grey", "--scenario", "civil", "--g", "0.01", "--out", str(p))
    assert code == 0
    assert load_model(p) == builtin(ScenarioId.CIVIL)
    code, _, _ = run_cli(capsys, "inject-grey", "--scenario", "web-case2")
    assert code == 3


def test_outputs_are_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        run_cli(capsys, "simulate", "--scenario", "civil", "--engine", "fggcm", "--lambda", "1.5", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()
    for p in (a, b):
        run_cli(capsys, "reproduce", "T5", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()
