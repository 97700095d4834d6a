"""Hot numeric loops, with a numba path and a pure-numpy fallback.

Set ``JRCC_DISABLE_NUMBA=1`` to force the numpy implementations (also used
automatically when numba cannot be imported). Both paths take 1-D float64
arrays of equal length and return a new array.
"""

from __future__ import annotations

import math
import os

import numpy as np

EPS0 = 8.8541878128e-12  # F/m

_DISABLE = os.environ.get("JRCC_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLE:
        raise ImportError("numba disabled by JRCC_DISABLE_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------

def rk4_tension_numpy(t_hold, mu, theta, alpha, n_steps):
    """Fixed-step RK4 on dT/dθ = μ(T + α) from T(0) = t_hold, vectorised over designs."""
    t = np.array(t_hold, dtype=np.float64, copy=True)
    mu = np.asarray(mu, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    h = np.asarray(theta, dtype=np.float64) / n_steps
    half = 0.5 * h
    sixth = h / 6.0
    for _ in range(n_steps):
        k1 = mu * (t + alpha)
        k2 = mu * (t + half * k1 + alpha)
        k3 = mu * (t + half * k2 + alpha)
        k4 = mu * (t + h * k3 + alpha)
        t = t + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return t


def governing_tension_numpy(voltage, gap, d, eps_d, eps_g, mu, theta, width, radius, t_hold):
    voltage = np.asarray(voltage, dtype=np.float64)
    gap = np.asarray(gap, dtype=np.float64)
    coulomb = 0.5 * EPS0 * voltage**2 * (eps_g * eps_d / (d * eps_g + gap * eps_d)) ** 2
    jr = 0.5 * EPS0 * voltage**2 * (eps_g / gap) ** 2
    mt = np.asarray(mu, dtype=np.float64) * np.asarray(theta, dtype=np.float64)
    alpha = (coulomb + jr) * width * radius
    return t_hold * np.exp(mt) + alpha * np.expm1(mt)


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _rk4_tension_nb(t_hold, mu, theta, alpha, n_steps):
        n = t_hold.shape[0]
        out = np.empty(n)
        for i in range(n):
            m = mu[i]
            a = alpha[i]
            h = theta[i] / n_steps
            half = 0.5 * h
            sixth = h / 6.0
            t = t_hold[i]
            for _ in range(n_steps):
                k1 = m * (t + a)
                k2 = m * (t + half * k1 + a)
                k3 = m * (t + half * k2 + a)
                k4 = m * (t + h * k3 + a)
                t = t + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            out[i] = t
        return out

    @njit(cache=True)
    def _governing_tension_nb(voltage, gap, d, eps_d, eps_g, mu, theta, width, radius, t_hold):
        n = voltage.shape[0]
        out = np.empty(n)
        for i in range(n):
            v2 = voltage[i] * voltage[i]
            c = eps_g[i] * eps_d[i] / (d[i] * eps_g[i] + gap[i] * eps_d[i])
            j = eps_g[i] / gap[i]
            beta = 0.5 * EPS0 * v2 * c * c + 0.5 * EPS0 * v2 * j * j
            mt = mu[i] * theta[i]
            out[i] = t_hold[i] * math.exp(mt) + beta * width[i] * radius[i] * math.expm1(mt)
        return out


def _vectors(*args):
    arrays = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in args))
    return [np.ascontiguousarray(a.ravel()) for a in arrays], arrays[0].shape


def rk4_tension(t_hold, mu, theta, alpha, n_steps: int, backend: str | None = None):
    """Batch RK4 tension oracle. ``backend`` is ``"numba"``, ``"numpy"`` or None (auto)."""
    (t_hold, mu, theta, alpha), shape = _vectors(t_hold, mu, theta, alpha)
    if _pick(backend) == "numba":
        out = _rk4_tension_nb(t_hold, mu, theta, alpha, int(n_steps))
    else:
        out = rk4_tension_numpy(t_hold, mu, theta, alpha, int(n_steps))
    return out.reshape(shape)


def governing_tension_batch(voltage, gap, d, eps_d, eps_g, mu, theta, width, radius, t_hold,
                            backend: str | None = None):
    """Closed-form load tension over broadcast parameter arrays."""
    vecs, shape = _vectors(voltage, gap, d, eps_d, eps_g, mu, theta, width, radius, t_hold)
    if _pick(backend) == "numba":
        out = _governing_tension_nb(*vecs)
    else:
        out = governing_tension_numpy(*vecs)
    return out.reshape(shape)


def _pick(backend):
    if backend is None:
        return "numba" if HAVE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable or disabled")
    return backend


def active_backend() -> str:
    return _pick(None)
