import json
import math

import numpy as np
import pytest

from curvcone import CurvatureOperator, integrate, random_curvature, scan_invariance
from curvcone.cones import ConeSpec
from curvcone.errors import InvalidArgumentError
from curvcone.io import (SCHEMA, dumps_report, field_from_json, field_to_json, kahler_from_json,
                         kahler_to_json, load_json, operator_from_json, operator_to_json,
                         operator_to_tensor_json, scan_report_json, trajectory_csv)
from curvcone.kahler import KahlerFieldSample, e_operator


def test_operator_roundtrip():
    R = random_curvature(5, seed=1)
    obj = json.loads(json.dumps(operator_to_json(R)))
    assert obj["format"] == "lambda2-matrix" and len(obj["entries"]) == 55
    assert np.array_equal(operator_from_json(obj).mat, R.mat)
    assert operator_from_json(operator_to_tensor_json(R)).allclose(R, atol=1e-15)


@pytest.mark.parametrize("obj", [
    [],
    {"n": 4, "format": "lambda2-matrix", "entries": [0.0] * 20},
    {"n": 4, "format": "lambda2-matrix", "entries": ["x"] * 21},
    {"n": 4, "format": "lambda2-matrix", "entries": [math.inf] * 21},
    {"n": 4, "format": "blob", "entries": []},
    {"n": True, "format": "lambda2-matrix", "entries": []},
])
def test_operator_from_json_rejects(obj):
    with pytest.raises(InvalidArgumentError):
        operator_from_json(obj)


def test_tensor_format_checks_symmetry():
    T = np.zeros(4 ** 4)
    T[1] = 1.0
    with pytest.raises(InvalidArgumentError):
        operator_from_json({"n": 4, "format": "tensor4", "entries": T.tolist()})


def test_kahler_and_field_roundtrip():
    E = e_operator(2)
    K = kahler_from_json(kahler_to_json(E))
    assert np.array_equal(K.tensor, E.tensor)
    field = KahlerFieldSample.from_operators([E, 3.0 * E], weights=[1, 3])
    back = field_from_json(field_to_json(field))
    assert back.lambda_bar_0 == pytest.approx(field.lambda_bar_0)
    with pytest.raises(InvalidArgumentError):
        kahler_from_json({"m": 2, "format": "tensor4", "entries": []})


def test_load_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(InvalidArgumentError):
        load_json(bad)
    with pytest.raises(InvalidArgumentError):
        load_json(tmp_path / "missing.json")


def test_scan_report_schema():
    rep = scan_invariance(5, 1.0, samples=50, seed=2, ascent=False)
    data = json.loads(dumps_report(scan_report_json(rep)))
    assert data["schema"] == SCHEMA
    assert data["cone"] == {"kind": "omega", "n": 5, "param": 1.0}
    for key in ("samples", "seed", "max_dF", "violations", "witness", "wall_ms"):
        assert key in data
    assert "wall_ms" not in json.loads(dumps_report(scan_report_json(rep), include_wall=False))


def test_nonfinite_values_serialize():
    data = json.loads(dumps_report({"x": math.inf, "y": np.float64(2.5), "z": np.int64(3)}))
    assert data == {"x": "inf", "y": 2.5, "z": 3, "schema": SCHEMA}


def test_trajectory_csv_columns():
    traj = integrate(CurvatureOperator.identity(4), 0.05)
    lines = trajectory_csv(traj, ConeSpec.omega(4, 0.5)).splitlines()
    assert lines[0] == "t,norm,lambda_bar,ric0_norm,weyl_norm,slack_omega_a"
    assert len(lines) == len(traj.samples) + 1
    assert trajectory_csv(traj).splitlines()[0] == "t,norm,lambda_bar,ric0_norm,weyl_norm"
