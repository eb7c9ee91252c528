"""Command-line front end.

Exit codes: 0 = success (contraction violations are results, not errors),
1 = config or parse error, 2 = numerical failure.
"""

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import __version__
from .contraction import (
    check_contraction,
    check_k_contraction,
    distance_profile,
    estimate_best_constant,
)
from .flow import edi_residual, integrate
from .functions import parse_function
from .norms import NonConvergenceError, NonsmoothPointError, parse_space
from .scenarios import (
    DEFAULT_S,
    run_scenario,
    search_witness,
    step1_scenario,
    step2_scenario,
    step3_tangency_scan,
    step4_scenario,
)


class _CliError(Exception):
    """Config/usage error (exit status 1)."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; route them to status 1
    def error(self, message):
        raise _CliError(message)


def _floats(text):
    try:
        return np.array([float(tok) for tok in text.split(",") if tok.strip()])
    except ValueError as exc:
        raise _CliError(f"cannot parse number list {text!r}") from exc


def parse_grid(text):
    """Grid spec: 'key=a:b:n;key2=v1,v2,...' -> dict of value arrays."""
    out = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        key, eq, val = part.partition("=")
        if not eq:
            raise _CliError(f"malformed grid field {part!r}")
        key = key.strip()
        if ":" in val:
            pieces = val.split(":")
            if len(pieces) != 3:
                raise _CliError(f"range must be start:stop:count, got {val!r}")
            start, stop, count = float(pieces[0]), float(pieces[1]), int(pieces[2])
            out[key] = np.linspace(start, stop, count)
        else:
            out[key] = _floats(val)
        if out[key].size == 0:
            raise _CliError(f"grid field {key!r} is empty")
    if not out:
        raise _CliError("empty grid specification")
    return out


def _family_grid(family, grid, default_s):
    """Cartesian parameter tuples in each family's canonical order."""
    keys = {"step1": ("eps", "c"), "step4": ("a",), "step2": ("c",)}
    if family not in keys:
        raise _CliError(f"unknown family {family!r}")
    missing = [k for k in keys[family] if k not in grid]
    if missing:
        raise _CliError(f"grid for {family} needs fields {missing}")
    axes = [grid[k] for k in keys[family]]
    if family in ("step4", "step2"):
        axes.append(grid.get("s", np.array([default_s])))
    mesh = np.meshgrid(*axes, indexing="ij")
    return [tuple(float(m.flat[i]) for m in mesh) for i in range(mesh[0].size)]


def build_parser():
    parser = _Parser(prog="normflow", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", default="json", choices=("json", "csv"))
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("axioms", help="randomized norm axiom check")
    p.add_argument("--space", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--dim", type=int, default=None)
    add_common(p)

    p = sub.add_parser("dual", help="dual norm of a covector")
    p.add_argument("--space", required=True)
    p.add_argument("--alpha", required=True)
    add_common(p)

    p = sub.add_parser("flow", help="integrate one gradient curve")
    p.add_argument("--space", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    add_common(p)

    p = sub.add_parser("contract", help="distance profile of two gradient curves")
    p.add_argument("--space", required=True)
    p.add_argument("--function", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--y0", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--k", type=float, default=None,
                   help="check the exponential K-contraction envelope")
    p.add_argument("--tol", type=float, default=1e-8)
    add_common(p)

    p = sub.add_parser("scenario", help="run a packaged counterexample scenario")
    step = p.add_subparsers(dest="step", required=True)
    s1 = step.add_parser("step1")
    s1.add_argument("--eps", type=float, required=True)
    s1.add_argument("--c", type=float, required=True)
    add_common(s1)
    s2 = step.add_parser("step2")
    s2.add_argument("--space", required=True)
    s2.add_argument("--c", type=float, required=True)
    s2.add_argument("--s", type=float, default=DEFAULT_S)
    add_common(s2)
    s3 = step.add_parser("step3")
    s3.add_argument("--space", required=True)
    s3.add_argument("--samples", type=int, default=64)
    add_common(s3)
    s4 = step.add_parser("step4")
    s4.add_argument("--p", type=float, required=True)
    s4.add_argument("--a", type=float, required=True)
    s4.add_argument("--s", type=float, default=DEFAULT_S)
    add_common(s4)

    p = sub.add_parser("witness", help="grid search for a violation witness")
    p.add_argument("--space", required=True)
    p.add_argument("--family", required=True, choices=("step1", "step2", "step4"))
    p.add_argument("--grid", required=True)
    add_common(p)

    p = sub.add_parser("bestc", help="empirical best-constant estimate")
    p.add_argument("--space", required=True)
    p.add_argument("--family", required=True, choices=("step1", "step2", "step4"))
    p.add_argument("--grid", required=True)
    add_common(p)
    return parser


def _space_from(config, dim=None, key="space"):
    try:
        return parse_space(config[key], dim=dim)
    except ValueError as exc:
        raise _CliError(str(exc)) from exc


def _function_from(config):
    try:
        return parse_function(config["function"])
    except ValueError as exc:
        raise _CliError(str(exc)) from exc


def execute(config):
    """Run one resolved configuration; returns (payload, csv_rows)."""
    command = config["command"]

    if command == "axioms":
        space = _space_from(config, dim=config.get("dim"))
        report = space.check_axioms(config["samples"], config["seed"])
        payload = report.to_dict()
        rows = [["check", "value"]] + [[k, v] for k, v in payload.items()
                                       if not isinstance(v, list)]
        return payload, rows

    if command == "dual":
        alpha = _floats(config["alpha"])
        space = _space_from(config, dim=alpha.size)
        value = space.dual_norm(alpha)
        maximizer = space.support_point(alpha) if np.any(alpha) else np.zeros_like(alpha)
        payload = {"value": float(value),
                   "maximizer": [float(v) for v in maximizer]}
        return payload, [["value"], [float(value)]]

    if command == "flow":
        x0 = _floats(config["x0"])
        space = _space_from(config, dim=x0.size)
        func = _function_from(config)
        traj = integrate(space, func, x0, config["T"], tol=config["tol"])
        report = edi_residual(space, func, traj, 0.0, traj.horizon)
        payload = {"trajectory": traj.to_dict(), "edi": report.to_dict()}
        return payload, traj.to_csv_rows()

    if command == "contract":
        x0 = _floats(config["x0"])
        y0 = _floats(config["y0"])
        space = _space_from(config, dim=x0.size)
        func = _function_from(config)
        xi = integrate(space, func, x0, config["T"], tol=config["tol"])
        zeta = integrate(space, func, y0, config["T"], tol=config["tol"])
        profile = distance_profile(space, xi, zeta,
                                   reversed_too=not space.is_symmetric)
        k = config.get("k")
        report = (check_contraction(profile) if k is None
                  else check_k_contraction(profile, k))
        payload = {"d0": profile.initial,
                   "report": report.to_dict(),
                   "profile": profile.to_dict()}
        return payload, profile.to_csv_rows()

    if command == "scenario":
        step = config["step"]
        if step == "step1":
            scenario = step1_scenario(config["eps"], config["c"])
        elif step == "step2":
            scenario = step2_scenario(_space_from(config, dim=2),
                                      config["c"], config["s"])
        elif step == "step4":
            scenario = step4_scenario(config["p"], config["a"], config["s"])
        else:
            space = _space_from(config, dim=2)
            scan = step3_tangency_scan(space, config["samples"])
            payload = scan.to_dict()
            rows = [["v1", "v2", "w1", "w2", "derivative"]]
            rows += [[*e["v"], *e["w"], e["derivative"]]
                     for e in payload["entries"]]
            return payload, rows
        run = run_scenario(scenario)
        payload = run.to_dict()
        best = next(pr for pr in run.pair_runs if pr.label == run.best_pair)
        return payload, best.profile.to_csv_rows()

    if command == "witness":
        space = _space_from(config, dim=2)
        grid = _family_grid(config["family"], parse_grid(config["grid"]), DEFAULT_S)
        witness = search_witness(space, config["family"], grid)
        payload = witness.to_dict()
        rows = [["max_ratio", "time_of_max", "pair"],
                [witness.max_ratio, witness.time_of_max, witness.pair_label]]
        return payload, rows

    if command == "bestc":
        space = _space_from(config, dim=2)
        grid = _family_grid(config["family"], parse_grid(config["grid"]), DEFAULT_S)
        estimate = estimate_best_constant(space, config["family"], grid)
        payload = estimate.to_dict()
        rows = [["params", "max_ratio"]]
        rows += [[";".join(map(str, r["params"])), r["max_ratio"]]
                 for r in payload["ratios"]]
        return payload, rows

    raise _CliError(f"unknown command {command!r}")


def _emit(document, rows, config):
    if config.get("format") == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(document, indent=2) + "\n"
    out = config.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None):
    """Parse arguments, execute, and emit a ReportDocument."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        config = {k: v for k, v in vars(ns).items() if v is not None}
        started = time.perf_counter()
        payload, rows = execute(config)
        duration = time.perf_counter() - started
    except _CliError as exc:
        print(f"normflow: error: {exc}", file=sys.stderr)
        return 1
    except (NonsmoothPointError, NonConvergenceError,
            np.linalg.LinAlgError) as exc:
        print(f"normflow: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError) as exc:
        print(f"normflow: error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"normflow: numerical failure: {exc}", file=sys.stderr)
        return 2
    document = {
        "version": __version__,
        "config": config,
        "results": payload,
        "duration_s": duration,
    }
    _emit(document, rows, config)
    return 0


def main(argv=None):
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
