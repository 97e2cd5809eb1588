"""Command-line front end.

Every command reads one scenario file and writes a JSON report of the shape
``{command, scenario_hash, seed, results, failures}``. Exit codes: 0 success,
1 a task or invariant failed, 2 malformed scenario or arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, InputError, NotInteriorError
from .hull import faces, fraction_to_str, to_vec, vec_to_json
from .kempfness import check_properties, exact_moment, kn_derivatives, moment_map
from .measures import (exact_measure_moment, measure_invert, measure_moment, measure_orbit_polytope,
                       pushforward)
from .orbitgeom import (ambient_max, density_experiment, flow_limit, flow_trajectory, invert_moment,
                        orbit_polytope, sample_image, wmax_membership)
from .render import polytope_svg, samples_csv
from .scenario import Scenario, ScenarioError, load_scenario
from .suite import run_suite
from .weights import act, stabilizer_algebra

COMMANDS = ("moment", "kn", "orbit", "flow", "invert", "faces", "density", "measure", "verify", "tasks")

CSV_HELP = """\
CSV output (--csv, orbit command): one row per sampled group element v, with
columns v_1..v_k (the element of the abelian algebra) followed by mu_1..mu_k
(the moment map at exp(v).x). SVG output (--svg) is available when k = 2.
"""


class TaskError(Exception):
    pass


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(s) for s in text.split(",")])
    except ValueError as exc:
        raise InputError(f"not a comma-separated list of numbers: {text!r}") from exc


def _rationals(text) -> tuple:
    if isinstance(text, list):
        return to_vec(text)
    return to_vec(s for s in str(text).split(","))


def _f(a) -> list[float]:
    return [float(t) for t in np.ravel(a)]


def _points(sc: Scenario, task: dict) -> list[str]:
    name = task.get("point")
    if name is None:
        return sorted(sc.points)
    if name not in sc.points:
        raise InputError(f"unknown point {name!r}")
    return [name]


def _need(task: dict, key: str):
    if task.get(key) is None:
        raise InputError(f"command {task['command']!r} needs --{key.replace('_', '-')}")
    return task[key]


def run_task(sc: Scenario, task: dict, samples: int, seed: int, tol: float,
             artifacts: dict | None = None) -> list[dict]:
    W = sc.weights
    cmd = task["command"]
    artifacts = {} if artifacts is None else artifacts
    out = []
    if cmd == "moment":
        for name in _points(sc, task):
            x = sc.points[name]
            out.append({"point": name, "moment": _f(moment_map(W, x)),
                        "moment_rational": vec_to_json(exact_moment(W, x)[0])})
    elif cmd == "kn":
        v = _floats(task["v"]) if task.get("v") is not None else np.zeros(W.dim_a)
        for name in _points(sc, task):
            ev = kn_derivatives(W, sc.points[name], v)
            rep = check_properties(W, sc.points[name], min(samples, 100), seed, tol)
            out.append({"point": name, "v": _f(v), "value": float(ev.value),
                        "gradient": _f(ev.gradient), "hessian": ev.hessian.tolist(),
                        "properties": rep.to_json()})
    elif cmd == "orbit":
        for name in _points(sc, task):
            x = sc.points[name]
            P = orbit_polytope(W, x)
            stab = stabilizer_algebra(W, x)
            vs, mus = sample_image(W, x, samples, seed)
            out.append({"point": name, "polytope": P.to_json(), "stabilizer": stab.to_json(),
                        "stabilizer_complement": stab.orthogonal_complement().to_json(),
                        "samples": samples})
            if artifacts.get("csv"):
                artifacts["csv_text"] = artifacts.get("csv_text", "") + samples_csv(vs, mus)
            if artifacts.get("svg"):
                if W.dim_a != 2:
                    raise InputError("--svg needs k = 2; use --csv for higher dimensions")
                artifacts["svg_text"] = polytope_svg(P, mus)
    elif cmd == "flow":
        beta = _rationals(_need(task, "beta"))
        grid = np.round(np.arange(0, 21) * 1.0, 10)
        for name in _points(sc, task):
            x = sc.points[name]
            fl = flow_limit(W, x, beta)
            out.append({"point": name, "beta": vec_to_json(beta), **fl.to_json(),
                        "ambient_max": fraction_to_str(ambient_max(W, beta)),
                        "in_wmax": wmax_membership(W, x, beta, ambient_max(W, beta)),
                        "trajectory": {"t": _f(grid), "mu_beta": _f(flow_trajectory(W, x, beta, grid))}})
    elif cmd == "invert":
        target = _rationals(_need(task, "target"))
        for name in _points(sc, task):
            x = sc.points[name]
            v = invert_moment(W, x, target, tol)
            res = float(np.linalg.norm(moment_map(W, act(W, v, x)) - [float(q) for q in target]))
            out.append({"point": name, "target": vec_to_json(target), "v": _f(v), "residual": res})
    elif cmd == "faces":
        for name in _points(sc, task):
            x = sc.points[name]
            P = orbit_polytope(W, x)
            rows = []
            for f in (faces(P) if P.dim else []):
                y = flow_limit(W, x, f.selector).limit
                rows.append({"selector": vec_to_json(f.selector),
                             "vertices": [vec_to_json(v) for v in f.polytope.vertices],
                             "witness_support": y.support_list,
                             "witness_matches": orbit_polytope(W, y) == f.polytope})
            out.append({"point": name, "polytope": P.to_json(), "faces": rows})
    elif cmd == "density":
        rep = density_experiment(W, task.get("x_spec") or "full", samples, seed)
        out.append(rep.to_json())
    elif cmd == "measure":
        names = [task["measure"]] if task.get("measure") else sorted(sc.measures)
        for name in names:
            if name not in sc.measures:
                raise InputError(f"unknown measure {name!r}")
            nu = sc.measures[name]
            row = {"measure": name, "moment": _f(measure_moment(W, nu)),
                   "moment_rational": vec_to_json(exact_measure_moment(W, nu)),
                   "polytope": measure_orbit_polytope(W, nu).to_json()}
            if task.get("target") is not None:
                target = _rationals(task["target"])
                v = measure_invert(W, nu, target, tol)
                row["inversion"] = {
                    "target": vec_to_json(target), "v": _f(v),
                    "residual": float(np.linalg.norm(measure_moment(W, pushforward(W, v, nu))
                                                     - [float(q) for q in target]))}
            out.append(row)
    else:
        raise InputError(f"unknown command {cmd!r}")
    return out


def build_report(sc: Scenario, command: str, task: dict | None, samples: int, seed: int,
                 tol: float, artifacts: dict) -> tuple[dict, int]:
    results: list = []
    failures: list = []
    if command == "verify":
        for r in run_suite(sc, samples, seed, tol):
            results.append(r.to_json())
            if not r.passed:
                failures.append(f"{r.subject}:{r.name}")
    else:
        tasks = sc.tasks if command == "tasks" else [task]
        for idx, t in enumerate(tasks):
            try:
                rows = run_task(sc, t, samples, seed, tol, artifacts)
                results.append({"task": idx, "command": t["command"], "results": rows})
            except (NotInteriorError, ConvergenceError) as exc:
                failures.append(f"task {idx} ({t['command']}): {exc}")
    report = {"command": command, "scenario_hash": sc.digest, "seed": seed,
              "results": results, "failures": failures}
    return report, (1 if failures else 0)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abelconvex", description="Gradient maps and orbit polytopes of torus actions on P^n.",
        epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--scenario", required=True, help="scenario JSON file")
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument("--samples", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed")
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--svg", help="SVG of polytope and sampled cloud (k = 2 only)")
    parser.add_argument("--csv", help="CSV dump of sampled (v, mu) pairs")
    parser.add_argument("--point", help="point name (default: every point)")
    parser.add_argument("--measure", help="measure name (default: every measure)")
    parser.add_argument("--v", help="group element, comma-separated floats")
    parser.add_argument("--beta", help="direction, comma-separated rationals")
    parser.add_argument("--target", help="target moment, comma-separated rationals")
    parser.add_argument("--x-spec", default="full",
                        help='"full", "real" or a comma-separated support pattern')
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    if args.samples < 1:
        print("error: --samples must be positive", file=sys.stderr)
        return 2
    try:
        sc = load_scenario(args.scenario)
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 2
    except ScenarioError as exc:
        print(f"error: malformed scenario: {exc}", file=sys.stderr)
        return 2
    task = {"command": args.command, "point": args.point, "measure": args.measure, "v": args.v,
            "beta": args.beta, "target": args.target, "x_spec": args.x_spec}
    artifacts = {"csv": args.csv, "svg": args.svg}
    try:
        report, code = build_report(sc, args.command, task, args.samples, args.seed, args.tol,
                                    artifacts)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv and "csv_text" in artifacts:
        Path(args.csv).write_text(artifacts["csv_text"])
    if args.svg and "svg_text" in artifacts:
        Path(args.svg).write_text(artifacts["svg_text"])
    for f in report["failures"]:
        print(f"FAILED {f}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
