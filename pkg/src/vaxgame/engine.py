"""SDE integration engine: Euler-Maruyama and Milstein schemes, reproducible
per-trajectory noise streams, absorption handling, and ensemble execution.

Trajectories are independent work units.  A path is fully determined by
(master_seed, stream_id, dt, t_end, scheme), so ensembles are reproducible
regardless of worker count or execution order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import _kernels
from .model import DomainError, ModelParams, State, in_domain


class Scheme(Enum):
    EULER_MARUYAMA = "euler_maruyama"
    MILSTEIN = "milstein"


class NumericalBlowupError(RuntimeError):
    """A non-finite intermediate appeared during integration."""

    def __init__(self, step: int, stream_id: Optional[int] = None):
        self.step = step
        self.stream_id = stream_id
        where = f" (stream {stream_id})" if stream_id is not None else ""
        super().__init__(f"non-finite state at step {step}{where}")


@dataclass(frozen=True)
class IntegratorConfig:
    scheme: Scheme = Scheme.MILSTEIN
    dt: float = 1e-3
    t_end: float = 100.0
    record_stride: int = 1
    clamp_epsilon: float = 1e-9

    def __post_init__(self):
        if self.dt <= 0.0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.t_end < self.dt:
            raise DomainError("t_end must be at least dt")
        if self.record_stride < 1:
            raise DomainError("record_stride must be >= 1")
        if self.clamp_epsilon < 0.0:
            raise DomainError("clamp_epsilon must be nonnegative")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class RandomStream:
    """Counter-based (Philox) noise stream keyed on (master_seed, stream_id).

    Distinct stream ids under one master seed give statistically independent
    increment sequences; identical keys reproduce bit-identical paths.
    """

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        bits = np.random.Philox(key=np.array(
            [self.master_seed & 0xFFFFFFFFFFFFFFFF,
             self.stream_id & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
        return np.random.Generator(bits)

    def increments(self, n_steps: int, dt: float) -> np.ndarray:
        """Normal(0, dt) increments for the two drivers, shape (n_steps, 2)."""
        return self.generator().standard_normal((n_steps, 2)) * math.sqrt(dt)


class XAbsorption(Enum):
    AT_ZERO = "at_zero"
    AT_ONE = "at_one"


_X_ABS = {_kernels.X_AT_ZERO: XAbsorption.AT_ZERO,
          _kernels.X_AT_ONE: XAbsorption.AT_ONE}


@dataclass
class Path:
    """A recorded trajectory with its absorption record and, optionally, the
    driving-noise increments."""

    times: np.ndarray
    states: np.ndarray          # (n_samples, 3) columns S, I, x
    absorbed_x: Optional[XAbsorption] = None
    absorbed_I: bool = False
    absorbed_x_time: Optional[float] = None
    absorbed_I_time: Optional[float] = None
    driver_record: Optional[np.ndarray] = None   # (n_steps, 2) raw dW
    dt: float = float("nan")
    control: Optional[np.ndarray] = None         # per-step u, when supplied

    _FIELDS = {"S": 0, "I": 1, "x": 2}

    def field(self, name: str) -> np.ndarray:
        return self.states[:, self._FIELDS[name]]

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def terminal(self) -> State:
        return State.from_array(self.states[-1])

    def to_csv(self, path, header_comment: Optional[str] = None):
        """Write `t,S,I,x` rows at full double precision."""
        with open(path, "w") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            fh.write("t,S,I,x\n")
            for t, (s, i, x) in zip(self.times, self.states):
                fh.write(f"{float(t)!r},{float(s)!r},{float(i)!r},{float(x)!r}\n")

    def drivers_to_csv(self, path):
        if self.driver_record is None:
            raise ValueError("path carries no driver record")
        with open(path, "w") as fh:
            fh.write("step,dW1,dW2\n")
            for n, (w1, w2) in enumerate(self.driver_record):
                fh.write(f"{n},{float(w1)!r},{float(w2)!r}\n")


ControlLike = Union[None, float, np.ndarray]


def _control_array(control: ControlLike, n_steps: int) -> np.ndarray:
    if control is None:
        return np.zeros(n_steps)
    if np.isscalar(control):
        return np.full(n_steps, float(control))
    arr = np.asarray(control, dtype=np.float64)
    if arr.shape != (n_steps,):
        raise DomainError(
            f"control array must have one value per step ({n_steps}), got {arr.shape}")
    return arr


def step(state: State, params: ModelParams, u: float, dW: Sequence[float],
         config: IntegratorConfig) -> State:
    """One integration step.  dW is the pair of Normal(0, dt) increments."""
    if not in_domain(state, tol=1e-9):
        raise DomainError(f"state {state} outside solution set")
    rec = np.empty((2, 3))
    dw = np.asarray(dW, dtype=np.float64).reshape(1, 2)
    u_arr = np.full(1, float(u))
    scheme = (_kernels.SCHEME_MILSTEIN if config.scheme is Scheme.MILSTEIN
              else _kernels.SCHEME_EULER)
    status, err_step, *_ = _kernels.simulate_kernel(
        state.as_array(), params.as_array(), u_arr, dw, config.dt, scheme,
        config.clamp_epsilon, 1, rec)
    if status != 0:
        raise NumericalBlowupError(err_step)
    return State.from_array(rec[1])


def simulate(initial: State, params: ModelParams,
             control: ControlLike = None,
             config: IntegratorConfig = IntegratorConfig(),
             stream: RandomStream = RandomStream(0, 0),
             record_drivers: bool = False,
             dW: Optional[np.ndarray] = None) -> Path:
    """Integrate one trajectory.

    The noise is drawn from `stream` unless an explicit `dW` array of raw
    increments (shape (n_steps, 2)) is supplied, e.g. for common-driver
    convergence studies.
    """
    if not in_domain(initial, tol=1e-12):
        raise DomainError(f"initial state {initial} outside solution set")
    n_steps = config.n_steps
    if dW is None:
        dW = stream.increments(n_steps, config.dt)
    else:
        dW = np.ascontiguousarray(dW, dtype=np.float64)
        if dW.shape != (n_steps, 2):
            raise DomainError(f"dW must have shape ({n_steps}, 2), got {dW.shape}")
    u_arr = _control_array(control, n_steps)

    n_rec = n_steps // config.record_stride + 1
    rec = np.empty((n_rec, 3))
    scheme = (_kernels.SCHEME_MILSTEIN if config.scheme is Scheme.MILSTEIN
              else _kernels.SCHEME_EULER)
    status, err_step, xa, ia, x_step, i_step = _kernels.simulate_kernel(
        initial.as_array(), params.as_array(), u_arr, dW, config.dt, scheme,
        config.clamp_epsilon, config.record_stride, rec)
    if status != 0:
        raise NumericalBlowupError(err_step, stream.stream_id)

    times = np.arange(n_rec) * (config.dt * config.record_stride)
    return Path(
        times=times,
        states=rec,
        absorbed_x=_X_ABS.get(xa),
        absorbed_I=bool(ia),
        absorbed_x_time=(x_step + 1) * config.dt if x_step >= 0 else None,
        absorbed_I_time=(i_step + 1) * config.dt if i_step >= 0 else None,
        driver_record=dW if record_drivers else None,
        dt=config.dt,
        control=u_arr if control is not None else None,
    )


def ensemble(initial: State, params: ModelParams, config: IntegratorConfig,
             n_paths: int, master_seed: int,
             reducer: Callable[[Path], object],
             control: ControlLike = None,
             n_workers: int = 1) -> list:
    """Run n_paths independent trajectories and apply `reducer` to each.

    Results are returned in stream-id order, so the aggregate is independent
    of worker count and execution order.  Path errors propagate with the
    stream id attached.
    """
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")

    def run(sid: int):
        path = simulate(initial, params, control=control, config=config,
                        stream=RandomStream(master_seed, sid))
        return reducer(path)

    ids = range(n_paths)
    if n_workers <= 1:
        return [run(sid) for sid in ids]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(run, ids))
