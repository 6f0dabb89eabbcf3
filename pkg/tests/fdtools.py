"""Finite-difference oracles for derivative checks.

Central differences with two-level Richardson extrapolation: the nested
stencil has an even error expansion, so combining estimates at h, h/2 and
h/4 cancels the h^2 and h^4 terms.  Step sizes grow with the derivative
order to keep float64 round-off amplification (eps / h^order) below the
truncation error.
"""

import numpy as np

STEP_BY_ORDER = {1: 1e-4, 2: 1e-3, 3: 4e-3, 4: 2.5e-2}


def _nested_partial(f, x, alpha, h):
    g = f
    for axis, k in enumerate(alpha):
        for _ in range(k):
            g = _axis_diff(g, axis, h)
    return g(np.asarray(x, dtype=float))


def _axis_diff(g, axis, h):
    def d(y):
        e = np.zeros_like(y)
        e[axis] = h
        return (g(y + e) - g(y - e)) / (2.0 * h)
    return d


def partial_fd(f, x, alpha, step=None):
    """Richardson-extrapolated partial derivative d^alpha f at x.

    `f` maps an ndarray point to a scalar; `alpha` is a multi-index.
    """
    order = int(sum(alpha))
    if order == 0:
        return f(np.asarray(x, dtype=float))
    h = STEP_BY_ORDER[order] if step is None else step
    d1 = _nested_partial(f, x, alpha, h)
    d2 = _nested_partial(f, x, alpha, h / 2.0)
    d4 = _nested_partial(f, x, alpha, h / 4.0)
    r1 = (4.0 * d2 - d1) / 3.0
    r2 = (4.0 * d4 - d2) / 3.0
    return (16.0 * r2 - r1) / 15.0
