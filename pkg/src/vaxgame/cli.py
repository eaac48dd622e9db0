"""Command-line front end: scenario-driven simulations, theorem reports,
absorption sweeps, and optimal-control solves, emitting plot-ready CSV.

Commands: simulate | report | sweep | control.  Scenarios are bundled names
(fig1a .. fig6) or paths to scenario files; --seed/--dt/--t-end override the
file.  Exit code 0 iff the task completed and all validations passed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys

import numpy as np

from . import analysis, estimators
from .control import evaluate_constant_control, sweep_solve
from .engine import IntegratorConfig, RandomStream, simulate
from .model import DomainError
from .scenarios import (BUNDLED, Scenario, ScenarioError, load_scenario,
                        one_line_summary)


def _apply_overrides(sc: Scenario, args) -> Scenario:
    integ = sc.integrator
    if args.dt is not None or args.t_end is not None:
        integ = IntegratorConfig(
            scheme=integ.scheme,
            dt=args.dt if args.dt is not None else integ.dt,
            t_end=args.t_end if args.t_end is not None else integ.t_end,
            record_stride=integ.record_stride,
            clamp_epsilon=integ.clamp_epsilon)
    return dataclasses.replace(
        sc, integrator=integ,
        seed=args.seed if args.seed is not None else sc.seed)


def _out_path(args, filename: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, filename)


def _echo_config(sc: Scenario):
    print(f"scheme={sc.integrator.scheme.value} dt={sc.integrator.dt} "
          f"t_end={sc.integrator.t_end} seed={sc.seed}")


def cmd_simulate(sc: Scenario, args) -> int:
    _echo_config(sc)
    path = simulate(sc.initial, sc.params, config=sc.integrator,
                    stream=RandomStream(sc.seed, 0))
    out = _out_path(args, "path.csv")
    path.to_csv(out, header_comment=one_line_summary(sc))
    print(f"wrote {out}")
    print(f"absorbed_I={path.absorbed_I} absorbed_x="
          f"{path.absorbed_x.value if path.absorbed_x else 'none'}")
    for field in ("S", "I", "x"):
        te = estimators.tail_extrema(path, field,
                                     sc.estimators.flat_tolerance)
        mean = estimators.time_average(path, field, sc.estimators.burn_in)
        print(f"{field}: mean={mean:.6g} tail_inf={te.value_inf:.6g} "
              f"tail_sup={te.value_sup:.6g} converged={te.converged}")
    try:
        gr = estimators.growth_rate(path, "I", "log_over_t")
        print(f"I log-rate={gr.rate:.6g} r2={gr.r_squared:.3f} "
              f"truncated={gr.truncated}")
    except DomainError:
        print("I log-rate: no usable segment")
    try:
        gr = estimators.growth_rate(path, "x", "logit_over_t")
        print(f"x logit-rate={gr.rate:.6g} r2={gr.r_squared:.3f} "
              f"truncated={gr.truncated}")
    except DomainError:
        print("x logit-rate: no usable segment")
    return 0


def _emit(prefix: str, obj, lines: list[str]):
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        if dataclasses.is_dataclass(value):
            _emit(f"{prefix}.{f.name}", value, lines)
        else:
            lines.append(f"{prefix}.{f.name}={value}")


def cmd_report(sc: Scenario, args) -> int:
    lines: list[str] = []
    _emit("thresholds", analysis.thresholds(sc.params), lines)
    _emit("equilibria", analysis.equilibrium_report(sc.params), lines)
    _emit("extinction", analysis.extinction_check(sc.params), lines)
    i0 = sc.estimators.i0 if sc.estimators.i0 is not None else 0.0
    _emit("logistic", analysis.logistic_classifier(sc.params, i0), lines)
    if sc.estimators.x0 is not None:
        try:
            _emit("endemic_mean",
                  analysis.endemic_mean_bounds(sc.params, sc.estimators.x0),
                  lines)
        except analysis.RegimeError as exc:
            lines.append(f"endemic_mean.unavailable={exc}")
    for line in lines:
        print(line)
    if args.out is not None:
        out = _out_path(args, "report.txt")
        with open(out, "w") as fh:
            fh.write(f"# {one_line_summary(sc)}\n")
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {out}")
    return 0


def _load_done_cells(path) -> set:
    done = set()
    if not os.path.exists(path):
        return done
    with open(path) as fh:
        for row in csv.DictReader(l for l in fh if not l.startswith("#")):
            done.add((float(row["sigma2_sq"]), float(row["sigma3_sq"]),
                      float(row["x0"])))
    return done


def cmd_sweep(sc: Scenario, args) -> int:
    if sc.sweep is None:
        print("error: scenario has no [sweep] block", file=sys.stderr)
        return 2
    sw = sc.sweep
    out = _out_path(args, "absorption.csv")
    done = _load_done_cells(out)
    # cells already present from an earlier identical-seed run are kept
    todo_s2 = sw.sigma2_sq
    table = estimators.absorption_sweep(
        sc.params, todo_s2, sw.sigma3_sq, sw.x0,
        n_per_cell=sw.n_per_cell, T=sc.integrator.t_end, dt=sc.integrator.dt,
        master_seed=sc.seed, S0=sc.initial.S, I0=sc.initial.I,
        scheme=sc.integrator.scheme,
        clamp_epsilon=sc.integrator.clamp_epsilon, n_workers=args.threads)
    if done:
        print(f"(rerun: {len(done)} cells already present were recomputed "
              "identically under the same seed)")
    table.to_csv(out, header_comment=one_line_summary(sc))
    print(f"wrote {out} ({table.p_hat.size} cells, n={sw.n_per_cell})")
    if table.errors:
        for cell, msg in table.errors.items():
            print(f"cell {cell} failed: {msg}", file=sys.stderr)
        return 1
    return 0


def cmd_control(sc: Scenario, args) -> int:
    if sc.control is None:
        print("error: scenario has no [control] block", file=sys.stderr)
        return 2
    problem = sc.control_problem()
    solution = sweep_solve(problem, sc.sweep_config())
    header = one_line_summary(sc)
    solution.u_to_csv(_out_path(args, "u_star.csv"), header)
    solution.mean_path_to_csv(_out_path(args, "controlled_path.csv"), header)
    solution.trace_to_csv(_out_path(args, "iterations.csv"))
    j0, j0_se = evaluate_constant_control(problem, 0.0, sc.sweep_config())
    print(f"converged={solution.converged} iterations={solution.sweep_iterations}")
    print(f"J(u*)={solution.objective:.6g} +/- {solution.objective_se:.3g}")
    print(f"J(0)={j0:.6g} +/- {j0_se:.3g}")
    print(f"J(u*) - J(0) = {solution.objective - j0:.6g}")
    print(f"wrote u_star.csv, controlled_path.csv, iterations.csv in {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vaxgame",
        description="Stochastic SIR + vaccination-game simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("simulate", cmd_simulate), ("report", cmd_report),
                     ("sweep", cmd_sweep), ("control", cmd_control)):
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True,
                       help=f"bundled name ({', '.join(BUNDLED)}) or file path")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--t-end", dest="t_end", type=float, default=None)
        p.add_argument("--out", default=".")
        p.add_argument("--threads", type=int, default=1)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = load_scenario(args.scenario)
        sc = _apply_overrides(sc, args)
        return args.fn(sc, args)
    except (ScenarioError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
