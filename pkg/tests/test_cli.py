import json
import math
import os
import subprocess
import sys
import tempfile

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expnewton import io as xio
from expnewton.cli import RunConfig, main, run, sweep
from expnewton.errors import ValidationError
from expnewton.phase import OrbitConfig, PhaseState
from expnewton.radial import RadialProfile


def _run(tmp_path, *args):
    out = tmp_path / "out"
    code = main([*args, "--output", str(out)])
    return code, out


def test_solve_json(tmp_path):
    code, out = _run(tmp_path, "solve", "--method", "parametric", "--format", "json")
    assert code == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"command", "inputs", "results", "diagnostics"}
    res = doc["results"]
    assert res["r_max"] == pytest.approx(1.230, abs=5e-3)
    assert res["u_end"] == pytest.approx(0.228, abs=5e-3)
    assert res["slope_end"] == pytest.approx(0.57735, abs=1e-5)
    assert doc["diagnostics"]["accepted_steps"] > 0


def test_solve_csv_roundtrip(tmp_path):
    code, out = _run(tmp_path, "solve")
    assert code == 0
    assert out.read_text().splitlines()[0] == "r,u,du"
    prof = xio.read_profile_csv(out)
    assert xio.profile_csv(prof) == out.read_text()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=20))
def test_profile_csv_roundtrip_exact(vals):
    v = np.array(vals)
    prof = RadialProfile(np.arange(v.size, dtype=float), v, v[::-1].copy(), "t")
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "p.csv")
        xio.atomic_write(path, xio.profile_csv(prof))
        back = xio.read_profile_csv(path)
    assert np.array_equal(back.u, prof.u) and np.array_equal(back.p, prof.p)


def test_resistance_cone_row(tmp_path):
    code, out = _run(tmp_path, "resistance", "--cone", "1", "1")
    assert code == 0
    header, row = out.read_text().splitlines()
    assert header == "lambda,E,err"
    lam, E, err = row.split(",")
    assert lam == "1" and float(E) == pytest.approx(math.pi / math.e, rel=1e-12) and float(err) >= 0


def test_resistance_table_and_profile(tmp_path):
    code, out = _run(tmp_path, "resistance", "--lambdas", "1", "10", "100")
    assert code == 0
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == 3
    assert float(rows[2].split(",")[1]) < 1e-3 * float(rows[0].split(",")[1])
    prof_path = tmp_path / "prof.csv"
    assert main(["solve", "--output", str(prof_path)]) == 0
    code, out = _run(tmp_path, "resistance", "--profile", str(prof_path), "--format", "json")
    assert code == 0
    assert 0 < json.loads(out.read_text())["results"]["E"] < math.pi * 1.231**2


def test_invalid_input_exit_2_without_output(tmp_path, capsys):
    code, out = _run(tmp_path, "solve", "--eps0", "-1")
    assert code == 2
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []
    line = json.loads(capsys.readouterr().err.strip())
    assert line["exit_code"] == 2 and line["error"] == "BadConfig"


@pytest.mark.parametrize("args", [
    ["picard", "--epsilon", "0.9"],
    ["picard", "--R", "0.5"],
    ["phase", "--x", "0.57735026918962573", "--theta", "0.52359877559829893"],
    ["phase"],
    ["resistance"],
    ["resistance", "--cone", "-1", "1"],
    ["resistance", "--profile", "/nonexistent.csv"],
    ["sweep"],
    ["sweep", "--start", "nonsense"],
    ["solve", "--method", "euler"],
    ["bogus"],
])
def test_validation_errors(tmp_path, args):
    code, out = _run(tmp_path, *args)
    assert code == 2 and not out.exists()


def test_numerical_failure_exit_3(tmp_path, capsys):
    code, out = _run(tmp_path, "picard", "--max-iter", "2")
    assert code == 3 and not out.exists()
    assert json.loads(capsys.readouterr().err)["error"] == "NoConvergence"


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"method": "direct", "format": "json", "eps0": 5e-4}))
    out = tmp_path / "a.json"
    assert main(["solve", "--config", str(cfg), "--eps0", "2e-4", "--output", str(out)]) == 0
    inputs = json.loads(out.read_text())["inputs"]
    assert inputs["method"] == "direct" and inputs["eps0"] == 2e-4
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["solve", "--config", str(cfg), "--output", str(out)]) == 2


def test_determinism(tmp_path):
    for args in (["solve"], ["picard", "--check-pairs", "3", "--seed", "5", "--format", "json"],
                 ["sweep", "--lambdas", "0.5"], ["phase", "--axis"]):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main([*args, "--output", str(a)]) == 0
        assert main([*args, "--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


def test_phase_outputs(tmp_path):
    code, out = _run(tmp_path, "phase", "--equilibria")
    assert code == 0
    text = out.read_text()
    assert text.startswith("kind,x,theta") and text.count("center") == 2
    code, out = _run(tmp_path, "phase", "--axis", "--format", "json")
    doc = json.loads(out.read_text())
    assert doc["results"]["class"] == "AxisToCritical"
    code, out = _run(tmp_path, "phase", "--x", "1", "--theta", "0.3")
    assert out.read_text().splitlines()[0] == "tau,x,theta,y"


def test_sweep_figure_starts(tmp_path):
    code, out = _run(tmp_path, "sweep", "--lambdas", "0.1", "0.5", "0.8", "--jobs", "2")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("index,x0,theta0,class")
    assert [l.split(",")[0] for l in lines[1:]] == ["0", "1", "2"]
    serial = tmp_path / "serial"
    main(["sweep", "--lambdas", "0.1", "0.5", "0.8", "--output", str(serial)])
    assert serial.read_text() == out.read_text()


def test_sweep_rows():
    oc = OrbitConfig(orientation="field")
    rows = sweep([PhaseState(1.0, 0.3), PhaseState(1.0, 0.3), (0.5, 0.1)], oc)
    assert rows[0][1:] == rows[1][1:]
    assert rows[2][2] == pytest.approx(math.atan(0.1))
    # a start on an equilibrium is recorded in its row, not raised
    bad = sweep([PhaseState(0.57735026918962573, 0.52359877559829893)], oc)
    assert bad[0][-1].startswith("StartIsEquilibrium")
    with pytest.raises(ValidationError):
        sweep([], oc)


def test_run_to_stdout(capsys):
    assert run(RunConfig("resistance", {"cone": [1.0, 2.0], "lambdas": None, "R": 1.0, "profile": None,
                                        "inner": None, "outer": None, "threshold": 1e-3})) == 0
    assert capsys.readouterr().out.startswith("lambda,E,err\n1,")


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "x.csv"
    xio.atomic_write(target, "a\n")
    xio.atomic_write(target, "b\n")
    assert target.read_text() == "b\n"
    assert [p.name for p in target.parent.iterdir()] == ["x.csv"]


def test_json_is_strict():
    text = xio.summary_json("t", {"a": float("nan")}, {"b": np.float64(math.inf), "c": np.arange(2)}, {})
    doc = json.loads(text)
    assert doc["inputs"]["a"] == "nan" and doc["results"]["b"] == "inf" and doc["results"]["c"] == [0, 1]


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run([sys.executable, "-m", "expnewton", "resistance", "--cone", "1", "1",
                           "--output", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0 and out.exists()
