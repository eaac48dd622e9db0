"""Path- and ensemble-level statistics: temporal means, growth-rate fits,
limsup/liminf estimation via time-reversed cumulative extrema, and absorption
probability sweeps over noise/initial-condition grids.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from .engine import IntegratorConfig, Path, RandomStream, Scheme, XAbsorption, simulate
from .model import DomainError, ModelParams, State

DEFAULT_BURN_IN_FRACTION = 0.2


def time_average(path: Path, field: str, burn_in: Optional[float] = None) -> float:
    """Trapezoidal time average of a path field over [burn_in, T].

    burn_in defaults to the first 20% of the horizon (the system mixes
    slowly, so early transients bias short-run means).
    """
    if burn_in is None:
        burn_in = DEFAULT_BURN_IN_FRACTION * path.t_end
    if burn_in >= path.t_end:
        raise DomainError(f"burn_in={burn_in} must be below the end time {path.t_end}")
    mask = path.times >= burn_in
    t = path.times[mask]
    y = path.field(field)[mask]
    if len(t) < 2:
        raise DomainError("averaging window contains fewer than two samples")
    return float(trapezoid(y, t) / (t[-1] - t[0]))


@dataclass(frozen=True)
class GrowthRate:
    rate: float
    r_squared: float
    transform: str
    truncated: bool          # absorption cut the fit window short
    window: tuple[float, float]


def growth_rate(path: Path, field: str, transform: str = "log_over_t") -> GrowthRate:
    """Least-squares slope of log(Y) (or logit(Y)) against t over the tail
    half of the pre-absorption part of the path.

    transform is "log_over_t" for (1/t) log Y decay rates or "logit_over_t"
    for (1/t) log(Y/(1-Y)) logistic rates.
    """
    y = path.field(field)
    t = path.times
    if transform == "log_over_t":
        valid = y > 0.0
    elif transform == "logit_over_t":
        valid = (y > 0.0) & (y < 1.0)
    else:
        raise DomainError(f"unknown transform {transform!r}")

    invalid = np.nonzero(~valid)[0]
    truncated = len(invalid) > 0
    end = invalid[0] if truncated else len(y)
    if end < 4:
        raise DomainError("no usable pre-absorption segment for a rate fit")
    lo = end // 2
    tw, yw = t[lo:end], y[lo:end]
    z = np.log(yw) if transform == "log_over_t" else np.log(yw / (1.0 - yw))
    slope, intercept = np.polyfit(tw, z, 1)
    resid = z - (slope * tw + intercept)
    ss_tot = float(np.sum((z - z.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return GrowthRate(rate=float(slope), r_squared=r2, transform=transform,
                      truncated=truncated, window=(float(tw[0]), float(tw[-1])))


@dataclass(frozen=True)
class TailEstimate:
    value_inf: float
    value_sup: float
    stable_window: tuple[float, float]
    converged: bool


def tail_extrema(path: Path, field: str, flat_tolerance: float = 1e-3) -> TailEstimate:
    """Estimate liminf/limsup from the cumulative extrema of the
    time-reversed sample sequence.

    The running max/min of the reversed sequence plateau once the tail
    behavior dominates; the estimate is read at the end of the middle 50% of
    the reversed sequence, and convergence requires both extrema to be flat
    (relative change below flat_tolerance) across that window.  The start of
    the reversed sequence (the final short stretch of the run, where the
    extrema cover too little time) is excluded from the flatness check.
    """
    y = path.field(field)
    n = len(y)
    if n < 8:
        raise DomainError("path too short for tail extrema")
    rev = y[::-1]
    cmax = np.maximum.accumulate(rev)
    cmin = np.minimum.accumulate(rev)
    a, b = n // 4, (3 * n) // 4

    def rel_change(c):
        scale = max(abs(c[b]), 1e-12)
        return abs(c[b] - c[a]) / scale

    converged = rel_change(cmax) < flat_tolerance and rel_change(cmin) < flat_tolerance
    # reversed indices a..b cover original times t[n-1-b] .. t[n-1-a]
    window = (float(path.times[n - 1 - b]), float(path.times[n - 1 - a]))
    return TailEstimate(value_inf=float(cmin[b]), value_sup=float(cmax[b]),
                        stable_window=window, converged=converged)


@dataclass
class AbsorptionTable:
    """Estimated P(lim x = 0 | x(0)) over a (sigma2^2, sigma3^2, x0) grid."""

    sigma2_sq: np.ndarray
    sigma3_sq: np.ndarray
    x0: np.ndarray
    p_hat: np.ndarray       # shape (len(s2), len(s3), len(x0))
    n_trials: int
    master_seed: int
    errors: dict = field(default_factory=dict)   # cell index -> message

    @property
    def std_err(self) -> np.ndarray:
        p = self.p_hat
        return np.sqrt(p * (1.0 - p) / self.n_trials)

    def to_csv(self, path, header_comment: Optional[str] = None):
        with open(path, "w") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            fh.write("sigma2_sq,sigma3_sq,x0,n,p_hat,se\n")
            se = self.std_err
            for i, s2 in enumerate(self.sigma2_sq):
                for j, s3 in enumerate(self.sigma3_sq):
                    for k, x0 in enumerate(self.x0):
                        fh.write(
                            f"{float(s2)!r},{float(s3)!r},{float(x0)!r},"
                            f"{self.n_trials},{float(self.p_hat[i, j, k])!r},"
                            f"{float(se[i, j, k])!r}\n")


def classify_x_outcome(path: Path) -> bool:
    """True if the trajectory counts toward x -> 0.

    Absorbed runs are classified by their absorbing state; runs still free at
    the horizon are split at the symmetric terminal threshold x(T) < 0.5.
    """
    if path.absorbed_x is XAbsorption.AT_ZERO:
        return True
    if path.absorbed_x is XAbsorption.AT_ONE:
        return False
    return path.field("x")[-1] < 0.5


def absorption_sweep(params_base: ModelParams,
                     sigma2_sq_grid, sigma3_sq_grid, x0_grid,
                     n_per_cell: int, T: float, dt: float, master_seed: int,
                     S0: float = 0.4, I0: float = 0.4,
                     scheme: Scheme = Scheme.MILSTEIN,
                     clamp_epsilon: float = 1e-9,
                     n_workers: int = 1) -> AbsorptionTable:
    """Monte Carlo estimate of P(x -> 0 | x(0)) on each grid cell.

    Trial seeds are assigned as stream_id = cell_index * n_per_cell + trial,
    so the table is reproducible regardless of parallel schedule.  Per-cell
    simulation failures are recorded instead of aborting the sweep.
    """
    s2g = np.asarray(sigma2_sq_grid, dtype=np.float64)
    s3g = np.asarray(sigma3_sq_grid, dtype=np.float64)
    x0g = np.asarray(x0_grid, dtype=np.float64)
    if s2g.size == 0 or s3g.size == 0 or x0g.size == 0:
        raise DomainError("sweep grid must be nonempty")
    if n_per_cell < 1:
        raise DomainError("n_per_cell must be >= 1")

    config = IntegratorConfig(scheme=scheme, dt=dt, t_end=T,
                              record_stride=max(1, int(round(T / dt)) // 100),
                              clamp_epsilon=clamp_epsilon)
    p_hat = np.full((s2g.size, s3g.size, x0g.size), np.nan)
    errors: dict = {}

    cells = [(i, j, k) for i in range(s2g.size) for j in range(s3g.size)
             for k in range(x0g.size)]

    def run_cell(idx):
        i, j, k = cells[idx]
        params = ModelParams(
            mu=params_base.mu, beta=params_base.beta, gamma=params_base.gamma,
            kappa=params_base.kappa, omega=params_base.omega,
            delta=params_base.delta, sigma1_sq=params_base.sigma1_sq,
            sigma2_sq=float(s2g[i]), sigma3_sq=float(s3g[j]))
        initial = State(S0, I0, float(x0g[k]))
        hits = 0
        try:
            for trial in range(n_per_cell):
                stream = RandomStream(master_seed, idx * n_per_cell + trial)
                path = simulate(initial, params, config=config, stream=stream)
                if classify_x_outcome(path):
                    hits += 1
            return idx, hits / n_per_cell, None
        except Exception as exc:  # keep the sweep alive, record the cell
            return idx, math.nan, str(exc)

    if n_workers <= 1:
        results = [run_cell(idx) for idx in range(len(cells))]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(run_cell, range(len(cells))))

    for idx, value, err in results:
        i, j, k = cells[idx]
        p_hat[i, j, k] = value
        if err is not None:
            errors[(i, j, k)] = err

    return AbsorptionTable(sigma2_sq=s2g, sigma3_sq=s3g, x0=x0g, p_hat=p_hat,
                           n_trials=n_per_cell, master_seed=master_seed,
                           errors=errors)
