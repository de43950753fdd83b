"""JSON and CSV formats for operators, reports and trajectories.

Operators:
    {"n": n, "format": "lambda2-matrix", "entries": [upper triangle incl. diagonal, row-major]}
    {"n": n, "format": "tensor4", "entries": [n^4 values, row-major]}
Kähler operators:
    {"m": m, "format": "tensor4-real", "entries": [(2m)^4 values]}
Field samples:
    {"m": m, "points": [{"K": <Kähler JSON>, "weight": w}, ...]}

Reports carry ``"schema": "curvcone/1"`` and are written with sorted keys so
that equal reports are byte-identical.  ``wall_ms`` is the only field that
depends on the run; :func:`dumps_report` can drop it.
"""

import csv
import io as _io
import json
import math

import numpy as np

from .cones import slack_mat
from .curvature import CurvatureOperator, decompose_mat, from_tensor
from .errors import InvalidArgumentError
from .kahler import KahlerCurvatureOperator, KahlerFieldSample

SCHEMA = "curvcone/1"


# ----------------------------------------------------------------------------
# operators
# ----------------------------------------------------------------------------

def operator_to_json(R):
    iu = np.triu_indices(R.N)
    return {"n": R.n, "format": "lambda2-matrix", "entries": [float(x) for x in R.mat[iu]]}


def _entries(obj, count):
    entries = obj.get("entries")
    if not isinstance(entries, list) or len(entries) != count:
        raise InvalidArgumentError(f"'entries' must be a list of {count} numbers")
    try:
        arr = np.array(entries, dtype=float)
    except (TypeError, ValueError):
        raise InvalidArgumentError("'entries' must contain only numbers") from None
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("'entries' must be finite")
    return arr


def _int_field(obj, key, low):
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < low:
        raise InvalidArgumentError(f"'{key}' must be an integer >= {low}, got {v!r}")
    return v


def operator_from_json(obj):
    """Parse either operator format; the tensor format is checked for all symmetries."""
    if not isinstance(obj, dict):
        raise InvalidArgumentError("operator JSON must be an object")
    n = _int_field(obj, "n", 2)
    fmt = obj.get("format")
    N = n * (n - 1) // 2
    if fmt == "lambda2-matrix":
        vals = _entries(obj, N * (N + 1) // 2)
        mat = np.zeros((N, N))
        mat[np.triu_indices(N)] = vals
        mat = mat + np.triu(mat, 1).T
        return CurvatureOperator.from_matrix(mat)
    if fmt == "tensor4":
        return from_tensor(_entries(obj, n ** 4).reshape((n,) * 4))
    raise InvalidArgumentError(f"unknown operator format {fmt!r}; use 'lambda2-matrix' or 'tensor4'")


def operator_to_tensor_json(R):
    return {"n": R.n, "format": "tensor4", "entries": [float(x) for x in R.tensor.ravel()]}


def kahler_to_json(K):
    return {"m": K.m, "format": "tensor4-real", "entries": [float(x) for x in K.tensor.ravel()]}


def kahler_from_json(obj):
    if not isinstance(obj, dict):
        raise InvalidArgumentError("Kähler JSON must be an object")
    m = _int_field(obj, "m", 1)
    if obj.get("format") != "tensor4-real":
        raise InvalidArgumentError(f"unknown Kähler format {obj.get('format')!r}; use 'tensor4-real'")
    return KahlerCurvatureOperator.from_tensor(_entries(obj, (2 * m) ** 4).reshape((2 * m,) * 4), m=m)


def field_from_json(obj):
    if not isinstance(obj, dict) or not isinstance(obj.get("points"), list):
        raise InvalidArgumentError("field JSON needs a 'points' list")
    m = _int_field(obj, "m", 1)
    ops, weights = [], []
    for p in obj["points"]:
        if not isinstance(p, dict) or "K" not in p:
            raise InvalidArgumentError("each point needs a 'K' entry")
        K = kahler_from_json(p["K"])
        if K.m != m:
            raise InvalidArgumentError(f"point has m={K.m}, field has m={m}")
        ops.append(K)
        weights.append(float(p.get("weight", 1.0)))
    return KahlerFieldSample.from_operators(ops, weights)


def field_to_json(sample):
    return {"m": sample.m,
            "points": [{"K": kahler_to_json(K), "weight": w} for K, _, w in sample.points]}


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path} is not valid JSON: {exc}") from None


# ----------------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------------

def _clean(x):
    """Plain JSON types; non-finite floats become strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, CurvatureOperator):
        return operator_to_json(x)
    if isinstance(x, KahlerCurvatureOperator):
        return kahler_to_json(x)
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def dumps_report(report, include_wall=True):
    data = dict(_clean(report))
    data["schema"] = SCHEMA
    if not include_wall:
        data.pop("wall_ms", None)
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def scan_report_json(rep):
    return {
        "cone": rep.cone.to_dict(),
        "samples": rep.samples,
        "seed": rep.seed,
        "max_dF": rep.max_dF,
        "sampled_max_dF": rep.sampled_max_dF,
        "violations": rep.violations,
        "ascent_used": rep.ascent_used,
        "ascent_iterations": rep.ascent_iterations,
        "tolerance": rep.tolerance,
        "witness": rep.worst_witness,
        "wall_ms": rep.wall_ms,
    }


def check_result_json(res):
    out = {
        "name": res.name,
        "kind": res.kind,
        "trials": res.trials,
        "dims": list(res.dims),
        "seed": res.seed,
        "tolerance": res.tolerance,
        "passed": res.passed,
        "witness_dim": res.witness_dim,
        "per_dim": {str(k): v for k, v in res.per_dim.items()},
    }
    if res.kind == "identity":
        out["max_residual"] = res.value
        out["control"] = res.control
    else:
        out["min_slack"] = res.value
    out["witness"] = res.witness
    return out


# ----------------------------------------------------------------------------
# trajectories
# ----------------------------------------------------------------------------

TRAJECTORY_COLUMNS = ("t", "norm", "lambda_bar", "ric0_norm", "weyl_norm", "slack_omega_a")


def trajectory_rows(traj, cone=None):
    rows = []
    for t, R in traj.samples:
        _, _, w, lam, ric0 = decompose_mat(R.mat)
        row = [t, float(np.linalg.norm(R.mat)), float(lam), float(np.linalg.norm(ric0)),
               float(np.linalg.norm(w))]
        if cone is not None:
            row.append(float(slack_mat(R.mat, cone)))
        rows.append(row)
    return rows


def trajectory_csv(traj, cone=None):
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = TRAJECTORY_COLUMNS if cone is not None else TRAJECTORY_COLUMNS[:-1]
    writer.writerow(cols)
    for row in trajectory_rows(traj, cone):
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


__all__ = [
    "SCHEMA", "operator_to_json", "operator_from_json", "operator_to_tensor_json",
    "kahler_to_json", "kahler_from_json", "field_from_json", "field_to_json", "load_json",
    "dumps_report", "scan_report_json", "check_result_json", "trajectory_csv", "trajectory_rows",
]
