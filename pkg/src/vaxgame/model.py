"""Coupled SIR / vaccination-game model: parameters, state space, payoffs,
and the drift/diffusion fields of the three-state, two-driver SDE system.

State is (S, I, x): susceptible fraction, infected fraction, and the fraction
of parents currently accepting vaccination.  The solution set is

    S_SET = {(s, i, x) : s >= 0, i >= 0, s + i <= 1, 0 <= x <= 1}.

Noise magnitudes are stored as variances (sigma_i^2); square roots are taken
only inside diffusion evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised when an input lies outside its admissible domain."""


@dataclass(frozen=True)
class ModelParams:
    """Epidemiological, behavioral, and noise parameters.

    mu, beta, gamma are per-year rates; kappa is the social learning rate;
    omega is the vaccination cost and delta the group pressure (utility
    units).  sigma1_sq is the transmission-noise variance; sigma2_sq and
    sigma3_sq are the utility-noise variances of the vaccinator and
    non-vaccinator groups.
    """

    mu: float
    beta: float
    gamma: float
    kappa: float
    omega: float
    delta: float
    sigma1_sq: float = 0.0
    sigma2_sq: float = 0.0
    sigma3_sq: float = 0.0

    def __post_init__(self):
        for name in ("mu", "beta", "gamma", "kappa"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("omega", "delta", "sigma1_sq", "sigma2_sq", "sigma3_sq"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"{name} must be nonnegative, got {getattr(self, name)}")

    @property
    def sigma_sq(self) -> float:
        """Combined utility-noise variance sigma2^2 + sigma3^2."""
        return self.sigma2_sq + self.sigma3_sq

    def as_array(self) -> np.ndarray:
        """Flat parameter vector in the order the integration kernels expect."""
        return np.array(
            [self.mu, self.beta, self.gamma, self.kappa, self.omega,
             self.delta, self.sigma1_sq, self.sigma2_sq, self.sigma3_sq],
            dtype=np.float64,
        )


@dataclass(frozen=True)
class State:
    """A point (S, I, x) in the solution set."""

    S: float
    I: float
    x: float

    def as_array(self) -> np.ndarray:
        return np.array([self.S, self.I, self.x], dtype=np.float64)

    @staticmethod
    def from_array(y) -> "State":
        return State(float(y[0]), float(y[1]), float(y[2]))


def in_domain(state: State, tol: float = 1e-12) -> bool:
    """True if (S, I, x) lies in the solution set up to tolerance."""
    return (
        state.S >= -tol
        and state.I >= -tol
        and state.S + state.I <= 1.0 + tol
        and -tol <= state.x <= 1.0 + tol
    )


def _require_domain(state: State, tol: float = 1e-9):
    if not in_domain(state, tol):
        raise DomainError(f"state {state} outside solution set (tol={tol})")


def payoffs(x: float, I: float, params: ModelParams) -> tuple[float, float]:
    """Payoff of vaccinating against a vaccinator, and of not vaccinating
    against a non-vaccinator: (-omega + delta*x, -I + delta*(1-x))."""
    if not (0.0 <= x <= 1.0 and 0.0 <= I <= 1.0):
        raise DomainError(f"payoffs require x, I in [0,1], got x={x}, I={I}")
    v12 = -params.omega + params.delta * x
    v21 = -I + params.delta * (1.0 - x)
    return v12, v21


def replicator_drift_from_payoffs(x: float, I: float, params: ModelParams) -> float:
    """Replicator drift built from the payoff difference plus the mutation
    term induced by the utility noise.  Algebraically identical to the x
    component of :func:`drift` at u=0; kept as a cross-check of the
    derivation, not a second simulation path.
    """
    v12, v21 = payoffs(x, I, params)
    k = params.kappa
    mutation = k * params.sigma3_sq * (1.0 - x) - k * params.sigma2_sq * x
    return k * x * (1.0 - x) * (v12 - v21 + mutation)


def drift(state: State, params: ModelParams, u: float = 0.0) -> np.ndarray:
    """Drift vector (dS, dI, dx) of the coupled system.

    u in [0,1] is the discount on the vaccination cost; u=0 recovers the
    uncontrolled model.
    """
    if not (0.0 <= u <= 1.0):
        raise DomainError(f"control u must lie in [0,1], got {u}")
    _require_domain(state)
    S, I, x = state.S, state.I, state.x
    p = params
    fS = p.mu * (1.0 - x) - p.beta * S * I - p.mu * S
    fI = p.beta * S * I - (p.mu + p.gamma) * I
    fx = p.kappa * x * (1.0 - x) * (
        -p.omega * (1.0 - u)
        + I
        + p.delta * (2.0 * x - 1.0)
        + p.kappa * (p.sigma3_sq - p.sigma_sq * x)
    )
    return np.array([fS, fI, fx])


def diffusion(state: State, params: ModelParams) -> np.ndarray:
    """3x2 diffusion matrix; column k is the loading on Wiener driver k.

    Column 1 carries the infection-transfer noise (-s1*S*I, +s1*S*I, 0);
    column 2 the replicator noise (0, 0, kappa*sqrt(s2^2+s3^2)*x*(1-x)).
    """
    _require_domain(state)
    S, I, x = state.S, state.I, state.x
    s1 = math.sqrt(params.sigma1_sq)
    sig = math.sqrt(params.sigma_sq)
    g = np.zeros((3, 2))
    g[0, 0] = -s1 * S * I
    g[1, 0] = s1 * S * I
    g[2, 1] = params.kappa * sig * x * (1.0 - x)
    return g


def diffusion_state_jacobian(state: State, params: ModelParams) -> np.ndarray:
    """Exact partials of each diffusion column w.r.t. (S, I, x).

    Returns an array J of shape (2, 3, 3) with J[k, i, j] = d G[i, k] / d y_j.
    """
    _require_domain(state)
    S, I, x = state.S, state.I, state.x
    s1 = math.sqrt(params.sigma1_sq)
    sig = math.sqrt(params.sigma_sq)
    jac = np.zeros((2, 3, 3))
    jac[0, 0, 0] = -s1 * I
    jac[0, 0, 1] = -s1 * S
    jac[0, 1, 0] = s1 * I
    jac[0, 1, 1] = s1 * S
    jac[1, 2, 2] = params.kappa * sig * (1.0 - 2.0 * x)
    return jac


def milstein_correction(state: State, params: ModelParams, dW: np.ndarray,
                        dt: float) -> np.ndarray:
    """Per-driver Milstein correction 0.5 * (G . dG) * (dW_k^2 - dt).

    Driver 1 loads only (S, I) through coefficients depending only on (S, I);
    driver 2 loads only x through a coefficient depending only on x, so the
    commutativity condition holds and no Levy-area terms are needed.
    """
    S, I, x = state.S, state.I, state.x
    c1 = 0.5 * params.sigma1_sq * S * I * (I - S) * (dW[0] ** 2 - dt)
    ks = params.kappa ** 2 * params.sigma_sq
    c2 = 0.5 * ks * x * (1.0 - x) * (1.0 - 2.0 * x) * (dW[1] ** 2 - dt)
    return np.array([c1, -c1, c2])
