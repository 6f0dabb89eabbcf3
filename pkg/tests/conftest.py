"""Shared fixtures: the corpus of reference webs used across the suite."""

import numpy as np
import pytest

from geoweb.web import WebChart

# Reference webs.  The first three building blocks of each n = 2 chart are
# x1, x2, -(x1+x2) so the normalized coframe is the coordinate coframe and
# hand computations stay tractable; the last slots carry the interesting
# functions.
CORPUS_SOURCES = {
    # flat: all functions linear, connection vanishes identically
    "parallel2": (2, ["x1", "x2", "-(x1+x2)", "x1+2*x2"]),
    "parallel3": (3, ["x1", "x2", "x3", "-(x1+x2+x3)", "x1+2*x2+3*x3"]),
    # curved connection, still linearizable (documented hand computation)
    "xy4": (2, ["x1", "x2", "-(x1+x2)", "x1+2*x2+x1*x2"]),
    # genuinely obstructed 4-web
    "curved4": (2, ["x1", "x2", "-(x1+x2)", "x1+2*x2+x1^2*x2"]),
    # n = 3 with a nonlinear slot, admissible on the whole domain ball
    "mixed3": (3, ["x1", "x2", "x3", "-(x1+x2+x3)",
                   "exp(x1)+2*x2+3*x3+x3^2"]),
    # five leaves of parallel lines: geodesic 5-web
    "lin5": (2, ["x1", "x2", "-(x1+x2)", "x1+2*x2", "x1+3*x2"]),
    # perturbed fifth foliation: not geodesic
    "pert5": (2, ["x1", "x2", "-(x1+x2)", "x1+2*x2", "x1+3*x2+x1^2*x2"]),
}

_RADII = {"mixed3": 0.4}


def make_web(name: str) -> WebChart:
    dim, sources = CORPUS_SOURCES[name]
    return WebChart.from_strings(dim, sources, radius=_RADII.get(name, 0.5))


@pytest.fixture(scope="session")
def corpus():
    return {name: make_web(name) for name in CORPUS_SOURCES}


def sample_points(web: WebChart, count: int, seed: int) -> np.ndarray:
    """Uniform points in the web's domain ball, deterministic."""
    rng = np.random.default_rng(seed)
    direc = rng.standard_normal((count, web.dim))
    direc /= np.linalg.norm(direc, axis=1, keepdims=True)
    radii = web.radius * rng.random(count) ** (1.0 / web.dim)
    return web.center + direc * radii[:, None]
