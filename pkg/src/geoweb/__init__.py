"""Webs of hypersurfaces: canonical connections, geodesicity, linearizability.

Given d scalar functions on an n-dimensional chart whose level sets form a
d-web (d >= n+2), this package normalizes the web coframe, builds the
canonical projective (and pointed affine) connection that makes every web
leaf totally geodesic, and evaluates the curvature obstructions that decide
local linearizability.  All derivatives are carried by truncated Taylor
jets; geodesic integration provides an independent dynamical check.
"""

__version__ = "0.1.0"
