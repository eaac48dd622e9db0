"""Stochastic optimal control of the vaccination-cost discount.

Maximizes J(u) = -E[ integral of alpha1*S + alpha2*I + (alpha3/2)*u^2 ] over
piecewise-constant controls u(t) in [0, u_max] via a forward-backward sweep:
forward-simulate an ensemble under the current control, integrate the
costate SDEs backward along each path reusing its Brownian increments, then
update the control through the projected stationarity formula

    u = clip( (kappa*omega/alpha3) * mean[p3 * x * (1 - x)], 0, u_max )

with relaxation.  The reported objective is evaluated on fresh noise streams
never used during the sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from . import _kernels
from .engine import (IntegratorConfig, NumericalBlowupError, Path,
                     RandomStream, Scheme, simulate)
from .model import DomainError, ModelParams, State


@dataclass(frozen=True)
class CostWeights:
    alpha1: float = 0.0
    alpha2: float = 0.0
    alpha3: float = 0.0

    def __post_init__(self):
        if min(self.alpha1, self.alpha2, self.alpha3) < 0.0:
            raise DomainError("cost weights must be nonnegative")


@dataclass(frozen=True)
class ControlProblem:
    params: ModelParams
    weights: CostWeights
    u_max: float
    t_final: float
    initial: State

    def __post_init__(self):
        if not 0.0 <= self.u_max < 1.0:
            raise DomainError(f"u_max must lie in [0,1), got {self.u_max}")
        if self.weights.alpha3 <= 0.0:
            raise DomainError("alpha3 must be positive (the control update divides by it)")
        if self.t_final <= 0.0:
            raise DomainError("t_final must be positive")


@dataclass(frozen=True)
class SweepConfig:
    n_noise_paths: int = 8
    max_iters: int = 200
    relaxation: float = 0.5
    tolerance: float = 1e-4
    dt: float = 1e-3
    master_seed: int = 0
    scheme: Scheme = Scheme.MILSTEIN
    n_eval_paths: int = 16            # held-out objective evaluation
    clamp_epsilon: float = 1e-9
    u_init: float = 0.0               # constant warm-start control

    def __post_init__(self):
        if not 0.0 < self.relaxation <= 1.0:
            raise DomainError("relaxation must lie in (0, 1]")
        if self.u_init < 0.0:
            raise DomainError("u_init must be nonnegative")


@dataclass
class CostatePath:
    times: np.ndarray
    p: np.ndarray            # (n_samples, 3) adjoints p1, p2, p3


@dataclass
class ControlSolution:
    times: np.ndarray        # control grid (left endpoints of the steps)
    u_star: np.ndarray
    state_path_mean: np.ndarray   # (n_samples, 3) ensemble-mean controlled states
    state_times: np.ndarray
    objective: float
    objective_se: float
    sweep_iterations: int
    converged: bool
    trace: list = field(default_factory=list)    # (iter, delta_u, J) tuples

    def u_to_csv(self, path, header_comment: Optional[str] = None):
        with open(path, "w") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            fh.write("t,u_star\n")
            for t, u in zip(self.times, self.u_star):
                fh.write(f"{float(t)!r},{float(u)!r}\n")

    def mean_path_to_csv(self, path, header_comment: Optional[str] = None):
        with open(path, "w") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            fh.write("t,S,I,x\n")
            for t, (s, i, x) in zip(self.state_times, self.state_path_mean):
                fh.write(f"{float(t)!r},{float(s)!r},{float(i)!r},{float(x)!r}\n")

    def trace_to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("iter,delta_u,J_estimate\n")
            for it, du, j in self.trace:
                fh.write(f"{it},{float(du)!r},{float(j)!r}\n")


def hamiltonian(state: State, u: float, p, q, params: ModelParams,
                weights: CostWeights) -> float:
    """H = -running cost + <f, p> + <g, q> for the controlled system."""
    S, I, x = state.S, state.I, state.x
    pr = params
    p1, p2, p3 = p
    q1, q2, q3 = q
    sig1 = np.sqrt(pr.sigma1_sq)
    sig = np.sqrt(pr.sigma_sq)
    running = (weights.alpha1 * S + weights.alpha2 * I
               + 0.5 * weights.alpha3 * u * u)
    f1 = pr.mu * (1.0 - x) - pr.beta * S * I - pr.mu * S
    f2 = pr.beta * S * I - (pr.mu + pr.gamma) * I
    f3 = pr.kappa * x * (1.0 - x) * (
        -pr.omega * (1.0 - u) + I + pr.delta * (2.0 * x - 1.0)
        + pr.kappa * (pr.sigma3_sq - pr.sigma_sq * x))
    g1 = -sig1 * S * I
    g2 = sig1 * S * I
    g3 = pr.kappa * sig * x * (1.0 - x)
    return (-running + p1 * f1 + p2 * f2 + p3 * f3
            + q1 * g1 + q2 * g2 + q3 * g3)


def costate_backward(forward_path: Path, u: np.ndarray, params: ModelParams,
                     weights: CostWeights,
                     p_cap: float = 1e12) -> CostatePath:
    """Integrate the three costate SDEs backward from p(T_f) = 0 along the
    stored forward path, reusing its recorded Brownian increments so the
    stochastic integrals are pathwise consistent.

    The forward path must record every integration step and carry its driver
    record.  Costate magnitudes are saturated at p_cap: along disease-free
    stretches (I = 0, S near 1) the infection adjoint grows backward at rate
    about beta*S - (mu + gamma), which overflows doubles on long horizons,
    while the projected control formula is already pinned at u_max far below
    the cap.
    """
    if forward_path.driver_record is None:
        raise DomainError("forward path carries no driver record")
    n_steps = forward_path.driver_record.shape[0]
    if forward_path.states.shape[0] != n_steps + 1:
        raise DomainError("forward path must be recorded at every step "
                          "(record_stride=1) for the backward sweep")
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (n_steps,):
        raise DomainError(f"control must have one value per step ({n_steps})")

    p_out = np.empty((n_steps + 1, 3))
    status, err_step = _kernels.costate_kernel(
        forward_path.states, u, forward_path.driver_record, forward_path.dt,
        params.as_array(), weights.alpha1, weights.alpha2, weights.alpha3,
        p_cap, p_out)
    if status != 0:
        raise NumericalBlowupError(err_step)
    return CostatePath(times=forward_path.times.copy(), p=p_out)


def objective(paths: list[Path], u: np.ndarray, weights: CostWeights,
              dt: float) -> tuple[float, float]:
    """Monte Carlo estimate of J(u) = -E[ integral of the running cost ],
    with its standard error, from paths simulated under u."""
    u = np.asarray(u, dtype=np.float64)
    u_mid = u  # piecewise-constant on the grid
    control_cost = 0.5 * weights.alpha3 * float(np.sum(u_mid * u_mid)) * dt
    vals = []
    for path in paths:
        S = path.field("S")
        I = path.field("I")
        state_cost = float(trapezoid(weights.alpha1 * S + weights.alpha2 * I,
                                     path.times))
        vals.append(-(state_cost + control_cost))
    vals = np.asarray(vals)
    se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return float(vals.mean()), se


def _forward_ensemble(problem: ControlProblem, u: np.ndarray,
                      config: IntegratorConfig, master_seed: int,
                      stream_offset: int, n_paths: int,
                      record_drivers: bool) -> list[Path]:
    return [
        simulate(problem.initial, problem.params, control=u, config=config,
                 stream=RandomStream(master_seed, stream_offset + sid),
                 record_drivers=record_drivers)
        for sid in range(n_paths)
    ]


# held-out evaluation streams must never collide with sweep streams
_EVAL_STREAM_OFFSET = 1_000_000


def sweep_solve(problem: ControlProblem,
                config: SweepConfig = SweepConfig()) -> ControlSolution:
    """Forward-backward sweep for the optimal vaccination-cost discount.

    Each iteration forward-simulates the sweep ensemble under the current
    control, integrates the costates backward per path, forms the candidate
    control from the ensemble-averaged p3*x*(1-x), and applies a relaxed
    update.  Stops when the sup-norm control change drops below tolerance.
    A non-converged sweep still returns its last iterate, flagged.
    """
    pr = problem.params
    int_config = IntegratorConfig(scheme=config.scheme, dt=config.dt,
                                  t_end=problem.t_final, record_stride=1,
                                  clamp_epsilon=config.clamp_epsilon)
    n_steps = int_config.n_steps
    u = np.full(n_steps, min(config.u_init, problem.u_max))
    gain = pr.kappa * pr.omega / problem.weights.alpha3

    trace = []
    converged = False
    iters = 0
    for it in range(1, config.max_iters + 1):
        iters = it
        paths = _forward_ensemble(problem, u, int_config, config.master_seed,
                                  0, config.n_noise_paths, record_drivers=True)
        feedback = np.zeros(n_steps)
        for path in paths:
            costates = costate_backward(path, u, pr, problem.weights)
            x = path.field("x")[:-1]
            p3 = costates.p[:-1, 2]
            feedback += p3 * x * (1.0 - x)
        feedback /= config.n_noise_paths

        candidate = np.clip(gain * feedback, 0.0, problem.u_max)
        delta = float(np.max(np.abs(candidate - u)))
        u = (1.0 - config.relaxation) * u + config.relaxation * candidate
        j_sweep, _ = objective(paths, u, problem.weights, config.dt)
        trace.append((it, delta, j_sweep))
        if delta < config.tolerance:
            converged = True
            break

    eval_paths = _forward_ensemble(problem, u, int_config, config.master_seed,
                                   _EVAL_STREAM_OFFSET, config.n_eval_paths,
                                   record_drivers=False)
    j, j_se = objective(eval_paths, u, problem.weights, config.dt)
    mean_states = np.mean([p.states for p in eval_paths], axis=0)

    return ControlSolution(
        times=np.arange(n_steps) * config.dt,
        u_star=u,
        state_path_mean=mean_states,
        state_times=eval_paths[0].times,
        objective=j,
        objective_se=j_se,
        sweep_iterations=iters,
        converged=converged,
        trace=trace,
    )


def evaluate_constant_control(problem: ControlProblem, u_value: float,
                              config: SweepConfig) -> tuple[float, float]:
    """J estimate for a constant control, on the held-out noise streams."""
    int_config = IntegratorConfig(scheme=config.scheme, dt=config.dt,
                                  t_end=problem.t_final, record_stride=1,
                                  clamp_epsilon=config.clamp_epsilon)
    u = np.full(int_config.n_steps, u_value)
    paths = _forward_ensemble(problem, u, int_config, config.master_seed,
                              _EVAL_STREAM_OFFSET, config.n_eval_paths,
                              record_drivers=False)
    return objective(paths, u, problem.weights, config.dt)
