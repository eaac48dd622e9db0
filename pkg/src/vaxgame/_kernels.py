"""Numba kernels for the SDE integrator and the backward costate sweep.

These loops run hundreds of millions of scalar steps across ensembles, so
they are compiled with numba.  The math duplicates the reference formulas in
:mod:`vaxgame.model`; the test suite pins the two against each other.

Parameter vectors are laid out as
(mu, beta, gamma, kappa, omega, delta, s1sq, s2sq, s3sq).
"""

import math

import numpy as np
from numba import njit

# absorption codes for x
X_FREE = 0
X_AT_ZERO = 1
X_AT_ONE = 2

SCHEME_EULER = 0
SCHEME_MILSTEIN = 1


@njit(cache=True, nogil=True)
def simulate_kernel(y0, pvec, u_arr, dW, dt, scheme, eps, record_stride,
                    rec_states):
    """Integrate n_steps = dW.shape[0] steps from y0.

    rec_states must have shape (n_steps // record_stride + 1, 3); row r holds
    the state after r*record_stride steps (row 0 is the initial state).

    Returns (status, err_step, absorbed_x_code, absorbed_I, x_abs_step,
    i_abs_step).  status != 0 signals a non-finite intermediate at err_step.
    """
    mu, beta, gamma, kappa, omega, delta, s1sq, s2sq, s3sq = (
        pvec[0], pvec[1], pvec[2], pvec[3], pvec[4], pvec[5], pvec[6],
        pvec[7], pvec[8])
    sig1 = math.sqrt(s1sq)
    ssq = s2sq + s3sq
    sig = math.sqrt(ssq)

    S = y0[0]
    I = y0[1]
    x = y0[2]
    n_steps = dW.shape[0]

    absorbed_x = X_FREE
    absorbed_I = False
    x_abs_step = -1
    i_abs_step = -1

    rec_states[0, 0] = S
    rec_states[0, 1] = I
    rec_states[0, 2] = x
    rec = 1

    for n in range(n_steps):
        u = u_arr[n]
        dW1 = dW[n, 0]
        dW2 = dW[n, 1]

        fS = mu * (1.0 - x) - beta * S * I - mu * S
        fI = beta * S * I - (mu + gamma) * I
        fx = kappa * x * (1.0 - x) * (
            -omega * (1.0 - u) + I + delta * (2.0 * x - 1.0)
            + kappa * (s3sq - ssq * x))
        gSI = sig1 * S * I
        gx = kappa * sig * x * (1.0 - x)

        Sn = S + fS * dt - gSI * dW1
        In = I + fI * dt + gSI * dW1
        xn = x + fx * dt + gx * dW2

        if scheme == SCHEME_MILSTEIN:
            c1 = 0.5 * s1sq * S * I * (I - S) * (dW1 * dW1 - dt)
            Sn += c1
            In -= c1
            c2 = (0.5 * kappa * kappa * ssq * x * (1.0 - x)
                  * (1.0 - 2.0 * x) * (dW2 * dW2 - dt))
            xn += c2

        if not (math.isfinite(Sn) and math.isfinite(In) and math.isfinite(xn)):
            return 1, n, absorbed_x, absorbed_I, x_abs_step, i_abs_step

        # absorption: I at 0; x at 0 and 1 (flags monotone, coordinate pinned)
        if absorbed_I or In <= eps:
            In = 0.0
            if not absorbed_I:
                absorbed_I = True
                i_abs_step = n
        if absorbed_x == X_FREE:
            if xn <= eps:
                xn = 0.0
                absorbed_x = X_AT_ZERO
                x_abs_step = n
            elif xn >= 1.0 - eps:
                xn = 1.0
                absorbed_x = X_AT_ONE
                x_abs_step = n
        elif absorbed_x == X_AT_ZERO:
            xn = 0.0
        else:
            xn = 1.0

        # projection to the solution set after the noise overshoot
        if Sn < 0.0:
            Sn = 0.0
        if In > 1.0:
            In = 1.0
        if Sn + In > 1.0:
            Sn = 1.0 - In
        if xn < 0.0:
            xn = 0.0
        elif xn > 1.0:
            xn = 1.0

        S = Sn
        I = In
        x = xn

        if (n + 1) % record_stride == 0:
            rec_states[rec, 0] = S
            rec_states[rec, 1] = I
            rec_states[rec, 2] = x
            rec += 1

    return 0, -1, absorbed_x, absorbed_I, x_abs_step, i_abs_step


@njit(cache=True, nogil=True)
def costate_kernel(states, u_arr, dW, dt, pvec, alpha1, alpha2, alpha3, p_cap,
                   p_out):
    """Backward pathwise Euler sweep of the three costate SDEs.

    states has shape (n_steps+1, 3) (every integration step recorded), dW
    shape (n_steps, 2) holds the forward Brownian increments.  p_out must
    have shape (n_steps+1, 3); the terminal row is set to zero.  The q
    loadings are the displayed diffusion coefficients of each costate
    equation.  Returns (status, err_step).

    Costates are saturated at magnitude p_cap: along disease-free stretches
    with S near 1 the infection adjoint grows backward at rate about
    beta*S - (mu + gamma) and would overflow, while the projected control
    formula saturates at u_max many orders of magnitude below the cap.
    """
    mu, beta, gamma, kappa, omega, delta, s1sq, s2sq, s3sq = (
        pvec[0], pvec[1], pvec[2], pvec[3], pvec[4], pvec[5], pvec[6],
        pvec[7], pvec[8])
    sig1 = math.sqrt(s1sq)
    ssq = s2sq + s3sq
    sig = math.sqrt(ssq)
    n_steps = dW.shape[0]

    p1 = 0.0
    p2 = 0.0
    p3 = 0.0
    p_out[n_steps, 0] = 0.0
    p_out[n_steps, 1] = 0.0
    p_out[n_steps, 2] = 0.0

    for k in range(n_steps - 1, -1, -1):
        S = states[k, 0]
        I = states[k, 1]
        x = states[k, 2]
        u = u_arr[k]
        dW1 = dW[k, 0]
        dW2 = dW[k, 1]

        a1 = (alpha1 + p1 * (beta * I + mu - 2.0 * s1sq * S * I * I)
              - p2 * (beta * I + 2.0 * s1sq * S * I * I))
        a2 = (alpha2 + p1 * (beta * S - 2.0 * s1sq * S * S * I)
              - p2 * (beta * S - (mu + gamma) + 2.0 * s1sq * S * S * I)
              - kappa * p3 * x * (1.0 - x))
        rep = (-omega * (1.0 - u) + I + delta * (2.0 * x - 1.0)
               + kappa * (s3sq - ssq * x))
        a3 = mu * p1 - kappa * p3 * (
            (1.0 - 2.0 * x) * rep
            + (2.0 * delta - kappa * ssq) * x * (1.0 - x)
            + 2.0 * kappa * ssq * x * (1.0 - x) * (1.0 - 2.0 * x))

        q1 = -sig1 * p1 * S * I
        q2 = sig1 * p2 * S * I
        q3 = kappa * sig * p3 * x * (1.0 - x)

        p1 = p1 - a1 * dt - q1 * dW1
        p2 = p2 - a2 * dt - q2 * dW1
        p3 = p3 - a3 * dt - q3 * dW2

        if not (math.isfinite(p1) and math.isfinite(p2) and math.isfinite(p3)):
            return 1, k

        if p1 > p_cap:
            p1 = p_cap
        elif p1 < -p_cap:
            p1 = -p_cap
        if p2 > p_cap:
            p2 = p_cap
        elif p2 < -p_cap:
            p2 = -p_cap
        if p3 > p_cap:
            p3 = p_cap
        elif p3 < -p_cap:
            p3 = -p_cap

        p_out[k, 0] = p1
        p_out[k, 1] = p2
        p_out[k, 2] = p3

    return 0, -1
