"""Declarative scenario files: a flat INI-style key-value format with
sectioned blocks, strict schemas, and bundled parameter sets for the
simulation studies shipped with the package.

Grammar: `[section]` headers followed by `key = value` lines; `#` starts a
comment.  Values are floats, ints, enum names, or comma-separated float
lists (grid axes).  Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .control import ControlProblem, CostWeights, SweepConfig
from .engine import IntegratorConfig, Scheme
from .model import ModelParams, State


class ScenarioError(ValueError):
    """Scenario file failed validation; the message names the offender."""


@dataclass(frozen=True)
class SweepBlock:
    sigma2_sq: tuple[float, ...]
    sigma3_sq: tuple[float, ...]
    x0: tuple[float, ...]
    n_per_cell: int


@dataclass(frozen=True)
class ControlBlock:
    alpha1: float
    alpha2: float
    alpha3: float
    u_max: float
    t_final: float
    n_noise_paths: int = 8
    n_eval_paths: int = 16
    max_iters: int = 200
    relaxation: float = 0.5
    tolerance: float = 1e-4
    u_init: float = 0.0


@dataclass(frozen=True)
class EstimatorBlock:
    n_paths: int = 200
    burn_in: Optional[float] = None
    flat_tolerance: float = 1e-3
    i0: Optional[float] = None        # empirical limiting mean of I, if known
    x0: Optional[float] = None        # empirical limiting mean of x, if known


@dataclass(frozen=True)
class Scenario:
    params: ModelParams
    initial: State
    integrator: IntegratorConfig
    seed: int
    sweep: Optional[SweepBlock] = None
    control: Optional[ControlBlock] = None
    estimators: EstimatorBlock = EstimatorBlock()

    def control_problem(self) -> ControlProblem:
        if self.control is None:
            raise ScenarioError("scenario has no [control] block")
        c = self.control
        return ControlProblem(
            params=self.params,
            weights=CostWeights(c.alpha1, c.alpha2, c.alpha3),
            u_max=c.u_max, t_final=c.t_final, initial=self.initial)

    def sweep_config(self, master_seed: Optional[int] = None) -> SweepConfig:
        c = self.control
        if c is None:
            raise ScenarioError("scenario has no [control] block")
        return SweepConfig(
            n_noise_paths=c.n_noise_paths, n_eval_paths=c.n_eval_paths,
            max_iters=c.max_iters, relaxation=c.relaxation,
            tolerance=c.tolerance, dt=self.integrator.dt,
            master_seed=self.seed if master_seed is None else master_seed,
            scheme=self.integrator.scheme,
            clamp_epsilon=self.integrator.clamp_epsilon,
            u_init=c.u_init)


_SCHEMA = {
    "params": {"mu", "beta", "gamma", "kappa", "omega", "delta",
               "sigma1_sq", "sigma2_sq", "sigma3_sq"},
    "initial": {"S", "I", "x"},
    "integrator": {"scheme", "dt", "t_end", "record_stride", "clamp_epsilon"},
    "run": {"seed"},
    "sweep": {"sigma2_sq", "sigma3_sq", "x0", "n_per_cell"},
    "control": {"alpha1", "alpha2", "alpha3", "u_max", "t_final",
                "n_noise_paths", "n_eval_paths", "max_iters", "relaxation",
                "tolerance", "u_init"},
    "estimators": {"n_paths", "burn_in", "flat_tolerance", "i0", "x0"},
}
_REQUIRED_SECTIONS = ("params", "initial", "integrator", "run")


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.split(",") if tok.strip())


def parse_scenario(text: str) -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str  # keep key case (S, I, x)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"malformed scenario file: {exc}") from exc

    for section in cp.sections():
        if section not in _SCHEMA:
            raise ScenarioError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in _SCHEMA[section]:
                raise ScenarioError(f"unknown key {key!r} in [{section}]")
    for section in _REQUIRED_SECTIONS:
        if section not in cp:
            raise ScenarioError(f"missing required section [{section}]")

    def need(section, key):
        if key not in cp[section]:
            raise ScenarioError(f"missing key {key!r} in [{section}]")
        return cp[section][key]

    try:
        params = ModelParams(**{k: float(need("params", k))
                                for k in sorted(_SCHEMA["params"])})
        initial = State(S=float(need("initial", "S")),
                        I=float(need("initial", "I")),
                        x=float(need("initial", "x")))
        integ = cp["integrator"]
        integrator = IntegratorConfig(
            scheme=Scheme(need("integrator", "scheme")),
            dt=float(need("integrator", "dt")),
            t_end=float(need("integrator", "t_end")),
            record_stride=int(integ.get("record_stride", "1")),
            clamp_epsilon=float(integ.get("clamp_epsilon", "1e-9")))
        seed = int(need("run", "seed"))

        sweep = None
        if "sweep" in cp:
            sweep = SweepBlock(
                sigma2_sq=_floats(need("sweep", "sigma2_sq")),
                sigma3_sq=_floats(need("sweep", "sigma3_sq")),
                x0=_floats(need("sweep", "x0")),
                n_per_cell=int(need("sweep", "n_per_cell")))

        control = None
        if "control" in cp:
            cb = cp["control"]
            control = ControlBlock(
                alpha1=float(need("control", "alpha1")),
                alpha2=float(need("control", "alpha2")),
                alpha3=float(need("control", "alpha3")),
                u_max=float(need("control", "u_max")),
                t_final=float(need("control", "t_final")),
                n_noise_paths=int(cb.get("n_noise_paths", "8")),
                n_eval_paths=int(cb.get("n_eval_paths", "16")),
                max_iters=int(cb.get("max_iters", "200")),
                relaxation=float(cb.get("relaxation", "0.5")),
                tolerance=float(cb.get("tolerance", "1e-4")),
                u_init=float(cb.get("u_init", "0")))

        est = EstimatorBlock()
        if "estimators" in cp:
            eb = cp["estimators"]
            est = EstimatorBlock(
                n_paths=int(eb.get("n_paths", "200")),
                burn_in=float(eb["burn_in"]) if "burn_in" in eb else None,
                flat_tolerance=float(eb.get("flat_tolerance", "1e-3")),
                i0=float(eb["i0"]) if "i0" in eb else None,
                x0=float(eb["x0"]) if "x0" in eb else None)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"invalid scenario value: {exc}") from exc

    return Scenario(params=params, initial=initial, integrator=integrator,
                    seed=seed, sweep=sweep, control=control, estimators=est)


def serialize_scenario(sc: Scenario) -> str:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp["params"] = {k: repr(getattr(sc.params, k))
                    for k in sorted(_SCHEMA["params"])}
    cp["initial"] = {"S": repr(sc.initial.S), "I": repr(sc.initial.I),
                     "x": repr(sc.initial.x)}
    cp["integrator"] = {
        "scheme": sc.integrator.scheme.value,
        "dt": repr(sc.integrator.dt),
        "t_end": repr(sc.integrator.t_end),
        "record_stride": str(sc.integrator.record_stride),
        "clamp_epsilon": repr(sc.integrator.clamp_epsilon)}
    cp["run"] = {"seed": str(sc.seed)}
    if sc.sweep is not None:
        cp["sweep"] = {
            "sigma2_sq": ", ".join(repr(v) for v in sc.sweep.sigma2_sq),
            "sigma3_sq": ", ".join(repr(v) for v in sc.sweep.sigma3_sq),
            "x0": ", ".join(repr(v) for v in sc.sweep.x0),
            "n_per_cell": str(sc.sweep.n_per_cell)}
    if sc.control is not None:
        c = sc.control
        cp["control"] = {
            "alpha1": repr(c.alpha1), "alpha2": repr(c.alpha2),
            "alpha3": repr(c.alpha3), "u_max": repr(c.u_max),
            "t_final": repr(c.t_final),
            "n_noise_paths": str(c.n_noise_paths),
            "n_eval_paths": str(c.n_eval_paths),
            "max_iters": str(c.max_iters),
            "relaxation": repr(c.relaxation),
            "tolerance": repr(c.tolerance),
            "u_init": repr(c.u_init)}
    e = sc.estimators
    est: dict = {"n_paths": str(e.n_paths), "flat_tolerance": repr(e.flat_tolerance)}
    if e.burn_in is not None:
        est["burn_in"] = repr(e.burn_in)
    if e.i0 is not None:
        est["i0"] = repr(e.i0)
    if e.x0 is not None:
        est["x0"] = repr(e.x0)
    cp["estimators"] = est

    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def one_line_summary(sc: Scenario) -> str:
    """Single-line rendering for CSV audit headers."""
    return " ".join(line for line in serialize_scenario(sc).splitlines() if line)


BUNDLED = ("fig1a", "fig1b", "fig2b", "fig3b", "fig3c", "fig4", "fig5a",
           "fig5b", "fig6")


def load_scenario(name_or_path: str) -> Scenario:
    """Load a bundled scenario by name, or any scenario file by path."""
    if name_or_path in BUNDLED:
        text = (resources.files(__package__) / "scenarios"
                / f"{name_or_path}.ini").read_text()
        return parse_scenario(text)
    with open(name_or_path) as fh:
        return parse_scenario(fh.read())
