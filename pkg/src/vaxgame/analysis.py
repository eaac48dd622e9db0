"""Closed-form analysis layer: reproduction numbers, drift equilibria with
their existence regions, the susceptible-divider threshold, and executable
checkers for the extinction, logistic-stability, temporal-mean, pathwise, and
time-average-deviation results.

Limiting temporal means (I0, x0) and pathwise tail values (x_*, x^*) are
inputs here, supplied empirically by :mod:`vaxgame.estimators`; this module
stays purely arithmetic.  All inequalities are evaluated strictly on doubles
with zero tolerance; boundary cases map to indeterminate/absent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .model import DomainError, ModelParams, State


class RegimeError(ValueError):
    """A checker's preconditions do not hold; the message names the violated
    inequality."""


# ---------------------------------------------------------------------------
# thresholds

@dataclass(frozen=True)
class Thresholds:
    r0: float
    r0s: float
    s_d: Optional[float] = None       # susceptible divider, when defined
    hit_s: Optional[float] = None     # stochastic herd-immunity threshold 1 - s_d


def basic_reproduction_number(params: ModelParams) -> float:
    return params.beta / (params.mu + params.gamma)


def stochastic_reproduction_number(params: ModelParams) -> float:
    return params.beta / (params.mu + params.gamma + 0.5 * params.sigma1_sq)


def susceptible_divider(params: ModelParams) -> Optional[float]:
    """s_d = (1/R0) * 2 / (1 + sqrt(1 - 2*s1^2/(beta*R0))), defined when the
    discriminant is nonnegative and R0^s > 1.  Reduces to 1/R0 at s1^2 = 0."""
    r0 = basic_reproduction_number(params)
    r0s = stochastic_reproduction_number(params)
    disc = 1.0 - 2.0 * params.sigma1_sq / (params.beta * r0)
    if disc < 0.0 or r0s <= 1.0:
        return None
    if params.sigma1_sq == 0.0:
        return 1.0 / r0
    return (1.0 / r0) * 2.0 / (1.0 + math.sqrt(disc))


def thresholds(params: ModelParams) -> Thresholds:
    s_d = susceptible_divider(params)
    return Thresholds(
        r0=basic_reproduction_number(params),
        r0s=stochastic_reproduction_number(params),
        s_d=s_d,
        hit_s=None if s_d is None else 1.0 - s_d,
    )


# ---------------------------------------------------------------------------
# equilibria

@dataclass(frozen=True)
class EquilibriumReport:
    e1: State
    e2: State
    e3: Optional[State]
    e4: Optional[State]
    e5: Optional[State]
    in_r31: bool
    in_r32: bool
    in_r51: bool
    in_r52: bool
    corner3: tuple[float, float]       # (delta, omega) boundary intersection
    corner5: tuple[float, float]
    absent_reasons: dict = field(default_factory=dict)


def _x3(params: ModelParams) -> tuple[Optional[float], Optional[str]]:
    denom = params.kappa * params.sigma_sq - 2.0 * params.delta
    if denom == 0.0:
        return None, "degenerate denominator"
    num = params.kappa * params.sigma3_sq - params.delta - params.omega
    return num / denom, None


def _x5(params: ModelParams) -> tuple[Optional[float], Optional[str]]:
    r0 = basic_reproduction_number(params)
    mg = params.mu + params.gamma
    denom = params.mu + (params.kappa * params.sigma_sq - 2.0 * params.delta) * mg
    if denom == 0.0:
        return None, "degenerate denominator"
    num = (params.mu * (1.0 - 1.0 / r0)
           + (params.kappa * params.sigma3_sq - params.delta - params.omega) * mg)
    return num / denom, None


def equilibrium_report(params: ModelParams) -> EquilibriumReport:
    p = params
    r0 = basic_reproduction_number(p)
    mg = p.mu + p.gamma
    reasons: dict = {}

    # E3 region boundaries in the (delta, omega) plane
    lo31 = p.delta - p.kappa * p.sigma2_sq
    hi31 = p.kappa * p.sigma3_sq - p.delta
    in_r31 = lo31 < p.omega < hi31
    in_r32 = hi31 < p.omega < lo31
    corner3 = (0.5 * p.kappa * p.sigma_sq,
               0.5 * p.kappa * (p.sigma3_sq - p.sigma2_sq))

    e3 = None
    x3, why = _x3(p)
    if why is not None:
        reasons["e3"] = why
    elif not (in_r31 or in_r32):
        reasons["e3"] = "(delta, omega) outside R3,1 and R3,2"
    elif not 0.0 <= x3 <= 1.0:
        reasons["e3"] = f"x3={x3} outside [0,1]"
    else:
        e3 = State(1.0 - x3, 0.0, x3)

    # E5 region boundaries
    frac = p.mu / mg
    lo51 = (-p.kappa * p.sigma2_sq + p.kappa * p.sigma_sq / r0
            + p.delta * (1.0 - 2.0 / r0))
    hi51 = -p.delta + frac * (1.0 - 1.0 / r0) + p.kappa * p.sigma3_sq
    in_r51 = lo51 < p.omega < hi51
    in_r52 = hi51 < p.omega < lo51
    corner5 = (0.5 * frac + 0.5 * p.kappa * p.sigma_sq,
               0.5 * frac * (1.0 - 2.0 / r0)
               + 0.5 * p.kappa * (p.sigma3_sq - p.sigma2_sq))

    e4 = None
    e5 = None
    if r0 <= 1.0:
        reasons["e4"] = reasons["e5"] = f"R0={r0} <= 1"
    else:
        e4 = State(1.0 / r0, frac * (1.0 - 1.0 / r0), 0.0)
        x5, why = _x5(p)
        if why is not None:
            reasons["e5"] = why
        elif not (in_r51 or in_r52):
            reasons["e5"] = "(delta, omega) outside R5,1 and R5,2"
        elif not 0.0 <= x5 <= 1.0 - 1.0 / r0:
            reasons["e5"] = f"x5={x5} outside [0, 1 - 1/R0]"
        else:
            e5 = State(1.0 / r0, frac * (1.0 - 1.0 / r0 - x5), x5)

    return EquilibriumReport(
        e1=State(0.0, 0.0, 1.0), e2=State(1.0, 0.0, 0.0),
        e3=e3, e4=e4, e5=e5,
        in_r31=in_r31, in_r32=in_r32, in_r51=in_r51, in_r52=in_r52,
        corner3=corner3, corner5=corner5, absent_reasons=reasons)


# ---------------------------------------------------------------------------
# extinction (almost-sure exponential stability of I = 0)

@dataclass(frozen=True)
class ExtinctionVerdict:
    condition: Optional[str]          # "CI", "CII", or None
    rate_bound: Optional[float]       # a.s. upper bound on (1/t) log I(t)
    details: dict = field(default_factory=dict)


def extinction_check(params: ModelParams) -> ExtinctionVerdict:
    p = params
    r0 = basic_reproduction_number(p)
    r0s = stochastic_reproduction_number(p)
    mg = p.mu + p.gamma

    # C.I needs s1^2/beta > max(1, R0/2); the interior-maximum argument
    # requires s1^2 > beta, so C.I can never fire when s1^2 <= beta.
    ci = p.sigma1_sq / p.beta > max(1.0, r0 / 2.0)
    cii = r0s < 1.0 and p.sigma1_sq <= p.beta

    bound_ci = None
    if ci:
        bound_ci = -(p.beta * mg / p.sigma1_sq) * (p.sigma1_sq / p.beta - r0 / 2.0)
    bound_cii = None
    if cii:
        bound_cii = -(mg + 0.5 * p.sigma1_sq) * (1.0 - r0s)

    details = {"r0": r0, "r0s": r0s, "sigma1_sq_over_beta": p.sigma1_sq / p.beta,
               "ci_bound": bound_ci, "cii_bound": bound_cii}
    if ci and cii:
        # both conditions hold: report the tighter decay-rate bound
        if bound_ci <= bound_cii:
            return ExtinctionVerdict("CI", bound_ci, details)
        return ExtinctionVerdict("CII", bound_cii, details)
    if ci:
        return ExtinctionVerdict("CI", bound_ci, details)
    if cii:
        return ExtinctionVerdict("CII", bound_cii, details)
    return ExtinctionVerdict(None, None, details)


# ---------------------------------------------------------------------------
# logistic stability of x at {0, 1}

@dataclass(frozen=True)
class LogisticVerdict:
    L_at_zero: float                  # L evaluated at (x0=0, I0)
    L_at_one: float                   # L evaluated at (x0=1, I0=0)
    classification: str               # to_zero | to_one | bistable | indeterminate


def logistic_L(params: ModelParams, x0: float, I0: float) -> float:
    """L(x0, I0) = -kappa*(s2^2 - s3^2)/2 - delta - omega + 2*delta*x0 + I0;
    (1/t) log(x/(1-x)) converges to kappa * L almost surely."""
    p = params
    return (-p.kappa * (p.sigma2_sq - p.sigma3_sq) / 2.0
            - p.delta - p.omega + 2.0 * p.delta * x0 + I0)


def logistic_classifier(params: ModelParams, I0: float) -> LogisticVerdict:
    if not 0.0 <= I0 <= 1.0:
        raise DomainError(f"I0 must lie in [0,1], got {I0}")
    L0 = logistic_L(params, 0.0, I0)
    L1 = logistic_L(params, 1.0, 0.0)
    if L0 < 0.0 and L1 < 0.0:
        cls = "to_zero"
    elif L0 > 0.0 and L1 > 0.0:
        cls = "to_one"
    elif L0 < 0.0 < L1:
        cls = "bistable"
    else:
        # boundary (some L = 0) or the sign pattern L0 > 0 > L1, which the
        # stated conditions do not cover
        cls = "indeterminate"
    return LogisticVerdict(L0, L1, cls)


# ---------------------------------------------------------------------------
# temporal-mean bounds in the endemic regime

@dataclass(frozen=True)
class EndemicMeanBounds:
    s_mean_lower: float               # mu*(1-x0)/(mu+beta) <= liminf S-bar
    s_mean_upper: float               # limsup S-bar <= 1 - x0
    s_mean_upper_part2: Optional[float]   # limsup S-bar <= 1/R0^s
    i_mean_lower: Optional[float]
    i_mean_upper: Optional[float]
    i_mean_exact: Optional[float]     # sigma1^2 = 0 limit of I-bar
    absent_reasons: dict = field(default_factory=dict)


def endemic_mean_bounds(params: ModelParams, x0: float) -> EndemicMeanBounds:
    if not 0.0 <= x0 <= 1.0:
        raise DomainError(f"x0 must lie in [0,1], got {x0}")
    p = params
    r0 = basic_reproduction_number(p)
    r0s = stochastic_reproduction_number(p)
    frac = p.mu / (p.mu + p.gamma)
    reasons: dict = {}

    if r0s <= 1.0:
        raise RegimeError(f"R0^s={r0s} <= 1: endemic temporal-mean bounds need R0^s > 1")

    i_lower = None
    s_upper2 = 1.0 / r0s
    if x0 < 1.0 - 1.0 / r0s:
        i_lower = frac * (1.0 - 1.0 / r0s - x0)
    else:
        reasons["i_mean_lower"] = f"x0={x0} >= 1 - 1/R0^s"

    i_upper = None
    if p.beta <= p.sigma1_sq:
        reasons["i_mean_upper"] = f"beta={p.beta} <= sigma1_sq={p.sigma1_sq}"
    else:
        cap = p.beta / (p.beta - p.sigma1_sq) * (1.0 - 1.0 / r0s)
        if x0 < cap:
            i_upper = frac * (cap - x0)
        else:
            reasons["i_mean_upper"] = f"x0={x0} >= beta/(beta - s1^2)*(1 - 1/R0^s)"

    i_exact = None
    if p.sigma1_sq == 0.0 and r0 > 1.0:
        i_exact = frac * (1.0 - 1.0 / r0 - x0)

    return EndemicMeanBounds(
        s_mean_lower=p.mu * (1.0 - x0) / (p.mu + p.beta),
        s_mean_upper=1.0 - x0,
        s_mean_upper_part2=s_upper2,
        i_mean_lower=i_lower,
        i_mean_upper=i_upper,
        i_mean_exact=i_exact,
        absent_reasons=reasons,
    )


# ---------------------------------------------------------------------------
# pathwise limsup/liminf bounds around the susceptible divider

@dataclass(frozen=True)
class PathwiseBounds:
    s_d: float
    hit_s: float
    s_sup_upper: float                # limsup S <= 1 - x_*
    i_inf_upper: float                # liminf I <= (1 - s_d - x_*) mu/(mu+gamma)
    i_sup_lower: float                # (1 - s_d - x^*) mu/(mu+gamma) <= limsup I
    i_sup_upper: float                # limsup I <= 1 - s_d
    degenerate_full_uptake: bool      # x^* = 1: I -> 0 and S -> 0


def pathwise_bounds(params: ModelParams, x_inf: float, x_sup: float) -> PathwiseBounds:
    if not (0.0 <= x_inf <= x_sup <= 1.0):
        raise DomainError(f"need 0 <= x_inf <= x_sup <= 1, got {x_inf}, {x_sup}")
    p = params
    r0 = basic_reproduction_number(p)
    r0s = stochastic_reproduction_number(p)
    if r0s <= 1.0:
        raise RegimeError(f"R0^s={r0s} <= 1: pathwise bounds need R0^s > 1")
    if p.sigma1_sq / p.beta >= r0 / 2.0:
        raise RegimeError(
            f"sigma1_sq/beta={p.sigma1_sq / p.beta} >= R0/2={r0 / 2.0}")
    s_d = susceptible_divider(p)
    frac = p.mu / (p.mu + p.gamma)
    return PathwiseBounds(
        s_d=s_d,
        hit_s=1.0 - s_d,
        s_sup_upper=1.0 - x_inf,
        i_inf_upper=(1.0 - s_d - x_inf) * frac,
        i_sup_lower=(1.0 - s_d - x_sup) * frac,
        i_sup_upper=1.0 - s_d,
        degenerate_full_uptake=(x_sup == 1.0),
    )


# ---------------------------------------------------------------------------
# time-average squared-deviation bound around an interior endemic equilibrium

@dataclass(frozen=True)
class DeviationBound:
    m: float
    bound: float
    s_center: float   # the S deviation is measured from this shifted value


def deviation_bound(params: ModelParams, equilibrium_e5: State) -> DeviationBound:
    p = params
    Se, Ie, xe = equilibrium_e5.S, equilibrium_e5.I, equilibrium_e5.x
    if xe in (0.0, 1.0):
        raise RegimeError(f"x_e={xe} must be interior to (0,1)")
    ssq = p.sigma_sq
    damp = 0.5 * (2.0 * p.mu + p.gamma) / p.beta * p.sigma1_sq * Ie
    if damp >= p.mu:
        raise RegimeError(
            f"(1/2)((2mu+gamma)/beta) s1^2 I_e = {damp} >= mu = {p.mu}")
    if p.delta >= 0.25 * p.kappa * ssq:
        raise RegimeError(
            f"delta = {p.delta} >= kappa*(s2^2+s3^2)/4 = {0.25 * p.kappa * ssq}")
    m = min(p.mu - damp, p.mu + p.gamma,
            p.mu * (0.5 * p.kappa * ssq - 2.0 * p.delta))
    bound = (1.0 / m) * (
        p.mu ** 2 * Se ** 2 / (p.mu - damp)
        + 0.5 * p.mu * p.kappa * ssq * xe * (1.0 - xe)
        + p.mu * xe
        + p.mu * Se * (1.0 - Se))
    return DeviationBound(m=m, bound=bound, s_center=p.mu * Se / (p.mu - damp))
