"""Pure numpy implementation of the numeric kernels.

A polynomial system is given by term arrays: ``coef[t]`` (float64),
``owner[t]`` (output slot), and a dense exponent matrix ``expo[t, v]``.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def eval_system(coef, owner, expo, y, n_out):
    """Right-hand side at state ``y``."""
    mon = np.prod(np.power(y[None, :], expo), axis=1) if expo.shape[0] else np.zeros(0)
    return np.bincount(owner, weights=coef * mon, minlength=n_out)


def eval_batch(coef, owner, expo, Y, n_out):
    """Evaluate at every row of ``Y``; returns shape (len(Y), n_out)."""
    out = np.zeros((Y.shape[0], n_out))
    if not expo.shape[0]:
        return out
    for t in range(expo.shape[0]):
        mon = np.prod(np.power(Y, expo[t][None, :]), axis=1)
        out[:, owner[t]] += coef[t] * mon
    return out


def rk4(coef, owner, expo, y0, dt, nsteps):
    """Fixed-step classic Runge-Kutta.

    Returns ``(states, n_valid)`` where ``states`` has ``nsteps + 1`` rows and
    ``n_valid`` counts the leading finite rows.
    """
    n = y0.shape[0]
    states = np.empty((nsteps + 1, n))
    y = np.array(y0, dtype=float)
    states[0] = y
    half = 0.5 * dt
    # overflow is reported through n_valid, not as a warning
    with np.errstate(over="ignore", invalid="ignore"):
        for s in range(nsteps):
            k1 = eval_system(coef, owner, expo, y, n)
            k2 = eval_system(coef, owner, expo, y + half * k1, n)
            k3 = eval_system(coef, owner, expo, y + half * k2, n)
            k4 = eval_system(coef, owner, expo, y + dt * k3, n)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(y)):
                return states, s + 1
            states[s + 1] = y
    return states, nsteps + 1
