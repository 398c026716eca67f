import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from geotomo.bodies import load_body_spec, make_body
from geotomo.cli import InputError, main, parse_hyperplane, parse_vector


@pytest.fixture()
def bodies(tmp_path):
    paths = {}
    for name, args in {
        "ball": ["--kind", "ellipsoid", "--semiaxes", "1,1,1"],
        "e213": ["--kind", "ellipsoid", "--semiaxes", "2,1,3"],
        "rev": ["--kind", "ellipsoid", "--semiaxes", "1,1,2"],
        "dh": ["--kind", "disc_hull"],
    }.items():
        path = tmp_path / f"{name}.json"
        assert main(["gen", *args, "--out", str(path)]) == 0
        paths[name] = str(path)
    return paths


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def test_parsers():
    assert np.allclose(parse_vector("1,2.5,-3"), [1, 2.5, -3])
    h = parse_hyperplane("0,0,2:1")
    assert np.allclose(h.normal, [0, 0, 1]) and h.offset == pytest.approx(0.5)
    assert parse_hyperplane("1,0,0").offset == 0.0
    for bad in ("1,x,2", "", "nan,0,0"):
        with pytest.raises(InputError):
            parse_vector(bad)
    with pytest.raises(InputError):
        parse_hyperplane("0,0,0:1")


def test_gen_round_trip(bodies, tmp_path):
    spec = load_body_spec(bodies["e213"])
    again = tmp_path / "again.json"
    assert main(["gen", "--kind", "ellipsoid", "--semiaxes", "2,1,3", "--out", str(again)]) == 0
    assert open(again).read() == open(bodies["e213"]).read()
    a, b = make_body(spec), make_body(load_body_spec(again))
    assert np.abs(a.vertices - b.vertices).max() <= 1e-12


def test_classify(bodies, tmp_path):
    out = tmp_path / "c.json"
    assert main(["classify", "--body", bodies["ball"], "--point", "0.3,0,0", "--grid", "60", "--out", str(out)]) == 0
    rep = read_json(out)
    assert rep["verdict"] == "revolution"
    assert rep["parameters"]["grid"] == 60 and rep["parameters"]["tol"] == 0.01
    assert rep["parameters"]["resolution"] == 256
    out2 = tmp_path / "c2.json"
    main(["classify", "--body", bodies["e213"], "--point", "0.5,0.2,0.1", "--grid", "60", "--out", str(out2)])
    assert read_json(out2)["verdict"] == "larman_not_revolution"


def test_classify_deterministic(bodies, tmp_path):
    outs = [tmp_path / f"r{i}.json" for i in range(2)]
    for o in outs:
        main(["classify", "--body", bodies["e213"], "--point", "0.5,0.2,0.1", "--grid", "30", "--seed", "4",
              "--out", str(o)])
    assert outs[0].read_bytes() == outs[1].read_bytes()


def test_input_errors(bodies, tmp_path, capsys):
    assert main(["classify", "--body", bodies["ball"], "--point", "2,0,0"]) == 2
    assert "point not interior" in capsys.readouterr().err
    assert main(["classify", "--body", str(tmp_path / "missing.json"), "--point", "0,0,0"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert main(["classify", "--body", str(bad), "--point", "0,0,0"]) == 2
    assert "malformed" in capsys.readouterr().err
    assert main(["classify", "--body", bodies["ball"], "--point", "0,0,0", "--tol", "0.5"]) == 2
    assert main(["classify", "--body", bodies["ball"], "--point", "0,0,0", "--grid", "4"]) == 2
    assert main(["verify", "--body", str(tmp_path / "missing.json"), "--point", "0,0,0", "--H", "0,0,1:0"]) == 2
    assert main(["gen", "--kind", "ellipsoid", "--semiaxes", "1,-1,1"]) == 2


def test_verify(bodies, tmp_path):
    out = tmp_path / "v.json"
    traces = tmp_path / "traces"
    code = main(["verify", "--body", bodies["rev"], "--point", "0.2,0,0.6", "--H", "0,0,1:0", "--grid", "60",
                 "--out", str(out), "--traces", str(traces)])
    assert code == 0
    rep = read_json(out)
    assert rep["conclusion"] == "ellipsoid_of_revolution_axis_perp_H"
    assert set(rep) == {"stages", "conclusion", "axis", "parameters"}
    assert len(list(traces.glob("trace_*.csv"))) == 8
    out2 = tmp_path / "v2.json"
    assert main(["verify", "--body", bodies["dh"], "--point", "0,0,0", "--H", "0,0,1:0", "--grid", "60",
                 "--out", str(out2)]) == 0
    assert read_json(out2)["conclusion"] == "hypothesis_violated"


def test_shadow(bodies, tmp_path):
    out, pts = tmp_path / "s.json", tmp_path / "s.csv"
    assert main(["shadow", "--body", bodies["e213"], "--dir", "1,0,0", "--out", str(out), "--csv", str(pts)]) == 0
    rep = read_json(out)
    assert rep["planarity"]["max_deviation"] < 1e-6
    assert rep["segment_free"] is True
    rows = list(csv.reader(open(pts)))
    assert rows[0] == ["angle", "x", "y", "z", "contact_extent"] and len(rows) == 257


def test_iterate(bodies, tmp_path, capsys):
    out = tmp_path / "trace.csv"
    assert main(["iterate", "--body", bodies["rev"], "--p", "0.2,0,0.5", "--H", "0,0,1:0", "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["converged"] is True
    rows = list(csv.reader(open(out)))
    assert rows[0][0] == "s" and len(rows) == summary["steps"] + 1


def test_module_entry_point(bodies):
    proc = subprocess.run(
        [sys.executable, "-m", "geotomo", "classify", "--body", bodies["ball"], "--point", "2,0,0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "point not interior" in proc.stderr
