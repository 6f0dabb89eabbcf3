"""Geodesic integration for the canonical connection.

The geodesic equation x'' = -Gamma(x)(x', x') is integrated with classic
fixed-step RK4.  Leaves of the defining foliations give an independent
check: along a geodesic started tangent to a leaf of a totally geodesic
foliation the function value must stay constant up to discretization
error, which `leaf_drift` quantifies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fastgamma
from .errors import DegenerateWebPoint, StepTooLarge
from .web import WebChart

_BLOWUP_FACTOR = 1e6


@dataclass
class Trajectory:
    """Sampled solution of the geodesic equation."""

    times: np.ndarray
    states: np.ndarray        # (steps+1, n)
    velocities: np.ndarray    # (steps+1, n)
    step: float
    method: str = "rk4"

    @property
    def endpoint(self) -> np.ndarray:
        return self.states[-1]


def _accel(gamma, v):
    return -np.einsum("cab,a,b->c", gamma, v, v)


def integrate_geodesic(gamma_of_x, x0, v0, T: float, h: float) -> Trajectory:
    """Integrate x'' = -Gamma(x)(x', x') from (x0, v0) over [0, T].

    `gamma_of_x` maps a point to the (n, n, n) Christoffel value array.
    The step is adjusted to divide T exactly; T < h still takes one step.
    """
    if h <= 0 or T <= 0:
        raise ValueError("time horizon and step must be positive")
    x = np.array(x0, dtype=float)
    v = np.array(v0, dtype=float)
    n = x.shape[0]
    steps = max(1, int(round(T / h)))
    h = T / steps
    times = np.linspace(0.0, T, steps + 1)
    states = np.empty((steps + 1, n))
    velocities = np.empty((steps + 1, n))
    states[0] = x
    velocities[0] = v
    vcap = _BLOWUP_FACTOR * (1.0 + float(np.linalg.norm(v)))
    for k in range(steps):
        try:
            a1 = _accel(gamma_of_x(x), v)
            x2, v2 = x + 0.5 * h * v, v + 0.5 * h * a1
            a2 = _accel(gamma_of_x(x2), v2)
            x3, v3 = x + 0.5 * h * v2, v + 0.5 * h * a2
            a3 = _accel(gamma_of_x(x3), v3)
            x4, v4 = x + h * v3, v + h * a3
            a4 = _accel(gamma_of_x(x4), v4)
        except DegenerateWebPoint as e:
            raise DegenerateWebPoint(
                "geodesic left the admissible set near t=%.6g: %s"
                % (times[k], e)) from None
        x = x + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))) \
                or np.linalg.norm(v) > vcap:
            raise StepTooLarge(
                "geodesic integration diverged near t=%.6g; "
                "reduce the step or the horizon" % times[k + 1])
        states[k + 1] = x
        velocities[k + 1] = v
    return Trajectory(times, states, velocities, h)


def integrate_geodesic_batch(gamma_batch, X0, V0, T: float,
                             h: float) -> Trajectory:
    """Batched RK4: `gamma_batch` maps (B, n) points to (B, n, n, n).

    Returns a Trajectory whose states and velocities have shape
    (steps+1, B, n).  All rows share the time grid; a degeneracy or
    blow-up anywhere in the batch aborts the whole call.
    """
    if h <= 0 or T <= 0:
        raise ValueError("time horizon and step must be positive")
    X = np.array(X0, dtype=float)
    V = np.array(V0, dtype=float)
    steps = max(1, int(round(T / h)))
    h = T / steps
    times = np.linspace(0.0, T, steps + 1)
    states = np.empty((steps + 1,) + X.shape)
    velocities = np.empty_like(states)
    states[0] = X
    velocities[0] = V
    vcap = _BLOWUP_FACTOR * (1.0 + np.linalg.norm(V, axis=1).max())

    def accel(P, U):
        return -np.einsum("bcad,ba,bd->bc", gamma_batch(P), U, U)

    for k in range(steps):
        try:
            A1 = accel(X, V)
            X2, V2 = X + 0.5 * h * V, V + 0.5 * h * A1
            A2 = accel(X2, V2)
            X3, V3 = X + 0.5 * h * V2, V + 0.5 * h * A2
            A3 = accel(X3, V3)
            X4, V4 = X + h * V3, V + h * A3
            A4 = accel(X4, V4)
        except DegenerateWebPoint as e:
            raise DegenerateWebPoint(
                "geodesic left the admissible set near t=%.6g: %s"
                % (times[k], e)) from None
        X = X + (h / 6.0) * (V + 2.0 * V2 + 2.0 * V3 + V4)
        V = V + (h / 6.0) * (A1 + 2.0 * A2 + 2.0 * A3 + A4)
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(V))) \
                or np.linalg.norm(V, axis=1).max() > vcap:
            raise StepTooLarge(
                "geodesic integration diverged near t=%.6g; "
                "reduce the step or the horizon" % times[k + 1])
        states[k + 1] = X
        velocities[k + 1] = V
    return Trajectory(times, states, velocities, h)


def tangent_vector(web: WebChart, i: int, point, direction) -> np.ndarray:
    """Project `direction` onto the leaf of foliation i through `point`.

    The result is orthogonal to grad f_i, i.e. tangent to the level set;
    foliation indices are 1-based.
    """
    jet = web.eval_function(i, point, order=1)
    g = jet.grad
    d = np.array(direction, dtype=float)
    gn = float(g @ g)
    if gn == 0.0:
        raise DegenerateWebPoint("foliation %d has vanishing gradient" % i)
    t = d - (float(g @ d) / gn) * g
    nt = np.linalg.norm(t)
    if nt == 0.0:
        raise DegenerateWebPoint(
            "direction is normal to foliation %d; no tangent component" % i)
    return t / nt


def leaf_drift(web: WebChart, i: int, traj: Trajectory) -> float:
    """Relative drift of f_i along the trajectory.

    max_t |f_i(x(t)) - f_i(x0)| divided by |grad f_i(x0)| times the
    polyline length, so the number is comparable across scalings of f_i
    and across trajectory lengths.  Foliation index is 1-based.
    """
    states = traj.states
    if states.ndim != 2:
        raise ValueError("leaf_drift expects a single-trajectory result")
    tree = web.functions[i - 1]
    values = fastgamma.batched_values(tree, states)
    dev = np.abs(values - values[0]).max()
    g = web.eval_function(i, states[0], order=1).grad
    gnorm = float(np.linalg.norm(g))
    seglen = float(np.linalg.norm(np.diff(states, axis=0), axis=1).sum())
    denom = gnorm * seglen
    if denom == 0.0:
        raise DegenerateWebPoint(
            "drift reference scale vanishes for foliation %d" % i)
    return float(dev / denom)


def leaf_drift_batch(web: WebChart, i: int, traj: Trajectory) -> np.ndarray:
    """Per-row leaf drift for a batched trajectory (states (T, B, n))."""
    states = traj.states
    T, B, n = states.shape
    tree = web.functions[i - 1]
    values = fastgamma.batched_values(tree, states.reshape(T * B, n))
    values = values.reshape(T, B)
    dev = np.abs(values - values[0]).max(axis=0)
    grads = np.empty((B, n))
    for b in range(B):
        grads[b] = web.eval_function(i, states[0, b], order=1).grad
    gnorm = np.linalg.norm(grads, axis=1)
    seglen = np.linalg.norm(np.diff(states, axis=0), axis=2).sum(axis=0)
    denom = gnorm * seglen
    if np.any(denom == 0.0):
        raise DegenerateWebPoint(
            "drift reference scale vanishes for foliation %d" % i)
    return dev / denom
