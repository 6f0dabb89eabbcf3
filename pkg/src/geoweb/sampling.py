"""Deterministic point samples inside a web chart's domain ball."""

from __future__ import annotations

import numpy as np

from .web import WebChart


def grid_points(web: WebChart, k: int) -> np.ndarray:
    """k^n lattice filling the cube inscribed in the domain ball.

    The cube has half-side radius/sqrt(n) so every lattice point lies in
    the closed ball; k = 1 returns the center alone.
    """
    if k < 1:
        raise ValueError("grid resolution must be >= 1")
    n = web.dim
    half = web.radius / np.sqrt(n)
    if k == 1:
        axes = [np.array([0.0])] * n
    else:
        axes = [np.linspace(-half, half, k)] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    return pts + web.center


def random_points(web: WebChart, count: int, seed: int) -> np.ndarray:
    """`count` points drawn uniformly from the domain ball, seeded."""
    if count < 1:
        raise ValueError("sample count must be >= 1")
    n = web.dim
    rng = np.random.default_rng(seed)
    direc = rng.standard_normal((count, n))
    direc /= np.linalg.norm(direc, axis=1, keepdims=True)
    radii = web.radius * rng.random(count) ** (1.0 / n)
    return web.center + direc * radii[:, None]
