"""Command-line front end.

Exit codes: 0 success, 1 a checked assertion failed, 2 invalid input.
Every command accepts ``--config FILE`` with ``key = value`` lines; flags given
on the command line take precedence.
"""

import argparse
import csv
import io
import math
import os
import sys

import numpy as np

from . import io as cio
from .cones import (ConeSpec, check_inclusions, epsilon_n, epsilon_n_exact, member, resolve_a,
                    scan_invariance, slack_mat)
from .curvature import CurvatureOperator, decompose_mat, identity_mat
from .errors import (DomainError, IntegrationError, InvalidArgumentError, UnsupportedDimensionError,
                     UnsupportedError)
from .hamilton import integrate, q_of
from .identities import IDENTITIES, INEQUALITIES, verify_identity, verify_inequality
from .kahler import (lift, pinching_check, pinching_implies_cone, resolve_pinch_a, tau_from_lambda0)

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID = 0, 1, 2
_INPUT_ERRORS = (InvalidArgumentError, UnsupportedDimensionError, DomainError, UnsupportedError)


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------------
# argument types
# ----------------------------------------------------------------------------

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be a non-negative integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"seed must be a non-negative integer, got {text!r}")
    return v


def _finite(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return v


def _dims(text):
    """``4-10`` or ``4,6,8``."""
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
            return tuple(range(lo, hi + 1))
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like '4-10' or '4,6,8', got {text!r}") from None


def _bool(text):
    key = str(text).strip().lower()
    if key in ("1", "true", "yes", "on"):
        return True
    if key in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


# ----------------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------------

def _common(p, randomized=True):
    p.add_argument("--config", help="key = value file; command-line flags override it")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--format", choices=("json", "csv", "text"), default=None)
    if randomized:
        p.add_argument("--seed", type=_seed, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="curvcone", description="Curvature-cone laboratory.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("epsilon", help="threshold eps_n below n/4")
    p.add_argument("--n", type=int)
    p.add_argument("--exact", action="store_true", help="print the exact fraction")
    _common(p, randomized=False)

    p = sub.add_parser("decompose", help="irreducible parts of an operator")
    p.add_argument("--input")
    _common(p, randomized=False)

    p = sub.add_parser("q", help="reaction term Q(R)")
    p.add_argument("--input")
    _common(p, randomized=False)

    p = sub.add_parser("flow", help="integrate dR/dt = Q(R)")
    p.add_argument("--input", help="initial operator JSON")
    p.add_argument("--n", type=int, help="start from c*I in dimension n when no input is given")
    p.add_argument("--c", type=_finite, default=1.0)
    p.add_argument("--t-end", type=_finite)
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--tol", type=_finite, default=1e-10)
    p.add_argument("--a", help="attach Omega(a): number, 'theorem' or 'nquarter'")
    _common(p, randomized=False)

    p = sub.add_parser("scan", help="search the boundary of Omega(a) for dF(Q) > 0")
    p.add_argument("--n", type=int)
    p.add_argument("--a", default="theorem")
    p.add_argument("--samples", type=_positive_int, default=10_000)
    p.add_argument("--no-ascent", action="store_true")
    p.add_argument("--ascent-iter", type=_positive_int, default=20)
    p.add_argument("--tolerance", type=_finite, default=1e-9)
    p.add_argument("--jobs", type=_positive_int)
    _common(p)

    p = sub.add_parser("inclusions", help="Omega(n/4 - 1/(2(n-1))) < Theta(delta_n) < Omega(n/4 - 1/n)")
    p.add_argument("--n", type=int)
    p.add_argument("--samples", type=_positive_int, default=10_000)
    _common(p)

    p = sub.add_parser("verify", help="run catalogued identities and inequalities")
    p.add_argument("--name", default="all",
                   help="catalogue entry or 'all': " + ", ".join([*IDENTITIES, *INEQUALITIES]))
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--dims", type=_dims, default=tuple(range(4, 11)))
    _common(p)

    p = sub.add_parser("lift", help="circle-bundle lift of a Kähler operator")
    p.add_argument("--input", help="Kähler operator JSON")
    p.add_argument("--tau", default="auto", help="positive number or 'auto'")
    p.add_argument("--lambda0", type=_finite, help="averaged lambda for --tau auto (default: lambda of K)")
    _common(p, randomized=False)

    p = sub.add_parser("pinch", help="pinching condition and the cone membership of the lift")
    p.add_argument("--input", help="Kähler operator JSON")
    p.add_argument("--field", help="field-sample JSON; lambda0 is its weighted mean")
    p.add_argument("--lambda0", type=_finite)
    p.add_argument("--m", type=int, default=2, help="complex dimension for random trials")
    p.add_argument("--a", default="theorem")
    p.add_argument("--eps", type=_finite, default=0.5)
    p.add_argument("--mode", choices=("theorem", "exploratory"), default="theorem")
    p.add_argument("--trials", type=_positive_int, default=1000)
    _common(p)
    return parser


# ----------------------------------------------------------------------------
# config files
# ----------------------------------------------------------------------------

def read_config(path):
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _subparser(parser, command):
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command]
    raise UsageError(f"unknown command {command!r}")


def _config_defaults(sub, command, values):
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    out = {}
    for key, raw in values.items():
        if key == "command":
            if raw != command:
                raise UsageError(f"config is for command {raw!r}, not {command!r}")
            continue
        if key not in actions:
            raise UsageError(f"unknown config key {key!r} for {command}")
        action = actions[key]
        try:
            if isinstance(action, argparse._StoreTrueAction):
                out[key] = _bool(raw)
            elif action.type is not None:
                out[key] = action.type(raw)
            else:
                out[key] = raw
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and out[key] not in action.choices:
            raise UsageError(f"config key {key!r}: {raw!r} not in {sorted(action.choices)}")
    return out


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = _subparser(parser, args.command)
        sub.set_defaults(**_config_defaults(sub, args.command, read_config(args.config)))
        args = parser.parse_args(argv)
    return args


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{args.command} needs --{name.replace('_', '-')}")


def _jobs(args):
    if getattr(args, "jobs", None) is not None:
        return args.jobs
    env = os.environ.get("CURVCONE_JOBS")
    if env is None or env == "":
        return 1
    try:
        return _positive_int(env)
    except argparse.ArgumentTypeError:
        raise UsageError(f"CURVCONE_JOBS must be a positive integer, got {env!r}") from None


def _load_operator(path):
    return cio.operator_from_json(cio.load_json(path))


def cmd_epsilon(args):
    _need(args, "n")
    if args.exact:
        return str(epsilon_n_exact(args.n)) + "\n", EXIT_OK
    if args.format == "json":
        return {"n": args.n, "epsilon": epsilon_n(args.n), "exact": str(epsilon_n_exact(args.n))}, EXIT_OK
    return repr(epsilon_n(args.n)) + "\n", EXIT_OK


def cmd_decompose(args):
    _need(args, "input")
    R = _load_operator(args.input)
    r_i, r_r, w, lam, ric0 = decompose_mat(R.mat)
    n = R.n
    return {
        "n": n, "lambda_bar": float(lam), "scal": float(n * lam),
        "norms": {"I": float(np.linalg.norm(r_i)), "Ric0": float(np.linalg.norm(r_r)),
                  "W": float(np.linalg.norm(w))},
        "ric0": ric0,
        "parts": {"I": CurvatureOperator(n, r_i), "Ric0": CurvatureOperator(n, r_r),
                  "W": CurvatureOperator(n, w)},
    }, EXIT_OK


def cmd_q(args):
    _need(args, "input")
    Q = q_of(_load_operator(args.input))
    return cio.operator_to_json(Q), EXIT_OK


def cmd_flow(args):
    _need(args, "t_end")
    if args.input is not None:
        R0 = _load_operator(args.input)
    elif args.n is not None:
        if args.n < 2:
            raise UsageError("--n must be >= 2")
        R0 = CurvatureOperator(args.n, args.c * identity_mat(args.n))
    else:
        raise UsageError("flow needs --input or --n")
    cone = None if args.a is None else ConeSpec.omega(R0.n, resolve_a(args.a, R0.n))
    try:
        traj = integrate(R0, args.t_end, normalized=args.normalized, tol=args.tol)
    except IntegrationError as exc:
        sys.stderr.write(f"integration failed: {exc}\n")
        return None, EXIT_VIOLATION
    code = EXIT_OK
    if cone is not None and member(R0, cone).member:
        slacks = [float(slack_mat(R.mat, cone)) / max(float(np.sum(R.mat ** 2)), 1e-300)
                  for _, R in traj.samples]
        if min(slacks) < -1e-12:
            code = EXIT_VIOLATION
    if args.format == "json":
        rows = cio.trajectory_rows(traj, cone)
        cols = cio.TRAJECTORY_COLUMNS if cone is not None else cio.TRAJECTORY_COLUMNS[:-1]
        return {"n": R0.n, "normalized": traj.normalized, "halt_reason": traj.halt_reason,
                "step_control": traj.step_control, "columns": list(cols), "rows": rows}, code
    return cio.trajectory_csv(traj, cone), code


def cmd_scan(args):
    _need(args, "n")
    if args.n < 4:
        raise UnsupportedDimensionError(f"scan needs n >= 4, got {args.n}")
    a = resolve_a(args.a, args.n)
    rep = scan_invariance(args.n, a, args.samples, seed=args.seed, ascent=not args.no_ascent,
                          jobs=_jobs(args), tol=args.tolerance, ascent_iter=args.ascent_iter)
    return cio.scan_report_json(rep), (EXIT_OK if rep.ok else EXIT_VIOLATION)


def cmd_inclusions(args):
    _need(args, "n")
    rep = check_inclusions(args.n, args.samples, seed=args.seed)
    failed = rep["asserted"] and not rep["ok"]
    return rep, (EXIT_VIOLATION if failed else EXIT_OK)


def _verify_one(name, args):
    if name in IDENTITIES:
        return verify_identity(name, args.trials, seed=args.seed, dims=args.dims)
    return verify_inequality(name, args.trials, seed=args.seed, dims=args.dims)


def cmd_verify(args):
    names = [*IDENTITIES, *INEQUALITIES] if args.name == "all" else [args.name]
    for name in names:
        if name not in IDENTITIES and name not in INEQUALITIES:
            raise UsageError(f"unknown check {name!r}; catalogue: {', '.join([*IDENTITIES, *INEQUALITIES])}")
    results = [_verify_one(name, args) for name in names]
    code = EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("name", "kind", "trials", "value", "tolerance", "passed", "witness_dim"))
        for r in results:
            writer.writerow((r.name, r.kind, r.trials, repr(r.value), repr(r.tolerance), r.passed, r.witness_dim))
        return buf.getvalue(), code
    return {"checks": [cio.check_result_json(r) for r in results],
            "passed": code == EXIT_OK}, code


def _lift_tau(args, K):
    if str(args.tau).strip().lower() == "auto":
        lam0 = K.lambda_bar if args.lambda0 is None else args.lambda0
        return tau_from_lambda0(lam0, K.m)
    try:
        return float(args.tau)
    except ValueError:
        raise UsageError(f"--tau must be a positive number or 'auto', got {args.tau!r}") from None


def cmd_lift(args):
    _need(args, "input")
    K = cio.kahler_from_json(cio.load_json(args.input))
    tau = _lift_tau(args, K)
    out = cio.operator_to_json(lift(K, tau))
    out["tau"] = tau
    return out, EXIT_OK


def _pinch_point(K, lam0, a, args, cone):
    holds, slack = pinching_check(K, None, lam0, a, args.eps, mode=args.mode)
    row = {"lambda_bar": K.lambda_bar, "lambda0": lam0, "holds": holds, "slack": slack}
    if holds:
        R = lift(K, tau_from_lambda0(lam0, K.m))
        mem = member(R, cone, tol=1e-12 * float(np.sum(R.mat ** 2)))
        row.update(cone_member=mem.member, cone_slack=mem.slack)
    return row


def cmd_pinch(args):
    if args.input is None and args.field is None:
        if args.mode != "theorem":
            raise UsageError("random pinching trials run in theorem mode only")
        rep = pinching_implies_cone(args.m, args.a, args.eps, args.trials, seed=args.seed)
        data = {k: getattr(rep, k) for k in ("m", "a", "eps", "trials", "in_hypothesis",
                                             "out_of_hypothesis", "counterexamples",
                                             "min_cone_slack", "min_scalar", "min_gap")}
        return data, (EXIT_OK if rep.ok else EXIT_VIOLATION)
    if args.field is not None:
        sample = cio.field_from_json(cio.load_json(args.field))
        points = [K for K, _, _ in sample.points]
        lam0 = sample.lambda_bar_0 if args.lambda0 is None else args.lambda0
    else:
        points = [cio.kahler_from_json(cio.load_json(args.input))]
        lam0 = points[0].lambda_bar if args.lambda0 is None else args.lambda0
    m = points[0].m
    a = resolve_pinch_a(args.a, m)
    cone = ConeSpec.omega(2 * m + 1, a)
    rows = [_pinch_point(K, lam0, a, args, cone) for K in points]
    bad = [r for r in rows if r["holds"] and not r.get("cone_member", True)]
    return {"m": m, "a": a, "eps": args.eps, "lambda0": lam0, "points": rows,
            "counterexamples": len(bad)}, (EXIT_VIOLATION if bad else EXIT_OK)


COMMANDS = {
    "epsilon": cmd_epsilon, "decompose": cmd_decompose, "q": cmd_q, "flow": cmd_flow,
    "scan": cmd_scan, "inclusions": cmd_inclusions, "verify": cmd_verify, "lift": cmd_lift,
    "pinch": cmd_pinch,
}


# ----------------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------------

def _render(payload, args):
    if payload is None:
        return ""
    if isinstance(payload, str):
        return payload
    if args.format == "csv":
        raise UsageError(f"{args.command} has no CSV output")
    return cio.dumps_report(payload)


def run(argv=None):
    """Run one command; returns the exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:           # argparse usage errors
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    except UsageError as exc:
        sys.stderr.write(f"curvcone: error: {exc}\n")
        return EXIT_INVALID
    try:
        payload, code = COMMANDS[args.command](args)
        text = _render(payload, args)
    except UsageError as exc:
        sys.stderr.write(f"curvcone {args.command}: error: {exc}\n")
        return EXIT_INVALID
    except _INPUT_ERRORS as exc:
        sys.stderr.write(f"curvcone {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_INVALID
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


__all__ = ["run", "main", "build_parser", "read_config"]
