"""Truncated multivariate Taylor arithmetic (jets) of order 0..4.

A jet stores the coefficients of a scalar function's Taylor expansion at a
base point, indexed by multi-indices in graded lexicographic order
(degree-major, x1-major within a degree).  The stored coefficient for a
multi-index alpha is the scaled derivative  d^alpha f / alpha!, so arithmetic
on jets is exact polynomial arithmetic truncated at the chosen order.

The hot kernels (truncated product and series composition) live in a
compiled extension with a pure-Python twin; GEOWEB_JET_BACKEND selects one
(auto, compiled, python).  Both backends accumulate in the same order and
return bit-identical coefficients.
"""

from __future__ import annotations

import math
import numbers
import os
from collections import namedtuple
from functools import lru_cache

import numpy as np

from .errors import DomainError, MixedContext, OrderExhausted, SingularSystem

MAX_ORDER = 4


def _load_backend():
    choice = os.environ.get("GEOWEB_JET_BACKEND", "auto").strip().lower() or "auto"
    if choice == "auto":
        try:
            from . import _jetcore as core
        except ImportError:
            from . import _jetcore_py as core
        return core
    if choice == "compiled":
        from . import _jetcore as core
        return core
    if choice == "python":
        from . import _jetcore_py as core
        return core
    raise ValueError(
        "GEOWEB_JET_BACKEND must be 'auto', 'compiled' or 'python', got %r" % choice
    )


_core = _load_backend()


def backend_name() -> str:
    """Name of the active kernel backend ('compiled' or 'python')."""
    return _core.BACKEND_NAME


def n_coeffs(dim: int, order: int) -> int:
    """Number of stored coefficients: C(dim + order, order)."""
    return math.comb(dim + order, order)


def _degree_block(dim, deg):
    if dim == 1:
        return [(deg,)]
    block = []
    for first in range(deg, -1, -1):
        for rest in _degree_block(dim - 1, deg - first):
            block.append((first,) + rest)
    return block


@lru_cache(maxsize=None)
def exponents(dim: int, order: int):
    """Multi-index layout: degree blocks 0..order, x1-major inside a block."""
    out = []
    for deg in range(order + 1):
        out.extend(_degree_block(dim, deg))
    return tuple(out)


_Tables = namedtuple("_Tables", "count index ia ib io diff")


@lru_cache(maxsize=None)
def _tables(dim, order):
    if dim < 1:
        raise ValueError("jet dim must be >= 1, got %d" % dim)
    if not 0 <= order <= MAX_ORDER:
        raise ValueError("jet order must be in 0..%d, got %d" % (MAX_ORDER, order))
    exps = exponents(dim, order)
    index = {e: i for i, e in enumerate(exps)}
    # product table, sorted by (output, left, right) so that a lower-order
    # table is the per-slot prefix of a higher-order one (exact truncation
    # consistency)
    trip = []
    for a, ea in enumerate(exps):
        da = sum(ea)
        for b, eb in enumerate(exps):
            if da + sum(eb) <= order:
                eo = tuple(p + q for p, q in zip(ea, eb))
                trip.append((index[eo], a, b))
    trip.sort()
    io = np.array([t[0] for t in trip], dtype=np.int32)
    ia = np.array([t[1] for t in trip], dtype=np.int32)
    ib = np.array([t[2] for t in trip], dtype=np.int32)
    diff = []
    if order >= 1:
        lower = exponents(dim, order - 1)
        lower_index = {e: i for i, e in enumerate(lower)}
        for axis in range(dim):
            src, dst, fac = [], [], []
            for i, e in enumerate(exps):
                if e[axis] > 0:
                    shifted = list(e)
                    shifted[axis] -= 1
                    src.append(i)
                    dst.append(lower_index[tuple(shifted)])
                    fac.append(float(e[axis]))
            diff.append((np.array(src, dtype=np.int32),
                         np.array(dst, dtype=np.int32),
                         np.array(fac)))
    return _Tables(len(exps), index, ia, ib, io, tuple(diff))


class Jet:
    """Dense truncated Taylor expansion over `dim` variables."""

    __slots__ = ("dim", "order", "coeffs")

    def __init__(self, dim: int, order: int, coeffs):
        tb = _tables(dim, order)
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (tb.count,):
            raise ValueError(
                "expected %d coefficients for dim %d order %d, got shape %s"
                % (tb.count, dim, order, coeffs.shape)
            )
        self.dim = dim
        self.order = order
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value: float, dim: int, order: int) -> "Jet":
        c = np.zeros(n_coeffs(dim, order))
        c[0] = value
        return cls(dim, order, c)

    @classmethod
    def variable(cls, axis: int, value: float, dim: int, order: int) -> "Jet":
        """Jet of the coordinate function x_{axis+1} at the given value."""
        if not 0 <= axis < dim:
            raise ValueError("axis %d out of range for dim %d" % (axis, dim))
        c = np.zeros(n_coeffs(dim, order))
        c[0] = value
        if order >= 1:
            c[1 + axis] = 1.0
        return cls(dim, order, c)

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    @property
    def grad(self):
        """First-derivative vector (zeros when order is 0)."""
        if self.order == 0:
            return np.zeros(self.dim)
        return self.coeffs[1:1 + self.dim].copy()

    def coeff(self, alpha) -> float:
        """Coefficient of the monomial with multi-index `alpha`."""
        tb = _tables(self.dim, self.order)
        try:
            return float(self.coeffs[tb.index[tuple(alpha)]])
        except KeyError:
            raise ValueError("multi-index %r not stored at order %d"
                             % (tuple(alpha), self.order)) from None

    def truncate(self, order: int) -> "Jet":
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError("cannot truncate order %d up to %d"
                             % (self.order, order))
        return Jet(self.dim, order, self.coeffs[:n_coeffs(self.dim, order)].copy())

    def derivative(self, axis: int) -> "Jet":
        """Partial derivative along coordinate axis (0-based); drops one order."""
        if self.order == 0:
            raise OrderExhausted("cannot differentiate an order-0 jet")
        if not 0 <= axis < self.dim:
            raise ValueError("axis %d out of range for dim %d" % (axis, self.dim))
        tb = _tables(self.dim, self.order)
        src, dst, fac = tb.diff[axis]
        out = np.zeros(n_coeffs(self.dim, self.order - 1))
        out[dst] = self.coeffs[src] * fac
        return Jet(self.dim, self.order - 1, out)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.dim != self.dim or other.order != self.order:
                raise MixedContext(
                    "jet contexts differ: dim %d/%d, order %d/%d"
                    % (self.dim, other.dim, self.order, other.order)
                )
            return other
        if isinstance(other, numbers.Real):
            return None  # handled as a scalar
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = self.coeffs.copy()
            c[0] += float(other)
            return Jet(self.dim, self.order, c)
        return Jet(self.dim, self.order, self.coeffs + o.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.dim, self.order, -self.coeffs)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = self.coeffs.copy()
            c[0] -= float(other)
            return Jet(self.dim, self.order, c)
        return Jet(self.dim, self.order, self.coeffs - o.coeffs)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.dim, self.order, self.coeffs * float(other))
        tb = _tables(self.dim, self.order)
        c = _core.mul(self.coeffs, o.coeffs, tb.ia, tb.ib, tb.io, tb.count)
        return Jet(self.dim, self.order, c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            if float(other) == 0.0:
                raise DomainError("division by zero scalar")
            return Jet(self.dim, self.order, self.coeffs / float(other))
        return self * _reciprocal(o)

    def __rtruediv__(self, other):
        if not isinstance(other, numbers.Real):
            return NotImplemented
        return float(other) * _reciprocal(self)

    def __pow__(self, p):
        return _power(self, p)

    def __rpow__(self, base):
        if not isinstance(base, numbers.Real):
            return NotImplemented
        return _power(Jet.constant(float(base), self.dim, self.order), self)

    def __repr__(self):
        return "Jet(dim=%d, order=%d, value=%.6g)" % (self.dim, self.order,
                                                      self.value)


def _apply_series(u: Jet, series) -> Jet:
    tb = _tables(u.dim, u.order)
    c = _core.compose(u.coeffs, np.asarray(series, dtype=float),
                      tb.ia, tb.ib, tb.io, tb.count)
    return Jet(u.dim, u.order, c)


def _reciprocal(u: Jet) -> Jet:
    u0 = u.value
    if u0 == 0.0:
        raise DomainError("division by a jet with zero value part")
    series = np.empty(u.order + 1)
    term = 1.0 / u0
    for j in range(u.order + 1):
        series[j] = term
        term = -term / u0
    return _apply_series(u, series)


def _int_power(u: Jet, k: int) -> Jet:
    # ascending product chain keeps truncation consistency exact
    out = Jet.constant(1.0, u.dim, u.order)
    for _ in range(k):
        out = out * u
    return out


def _power(u: Jet, p) -> Jet:
    if isinstance(p, Jet):
        if np.any(p.coeffs[1:] != 0.0):
            return exp(p * log(u))
        p = p.value
    if isinstance(p, numbers.Integral) or float(p) == int(p):
        k = int(p)
        if k >= 0:
            return _int_power(u, k)
        return _reciprocal(_int_power(u, -k))
    return exp(float(p) * log(u))


def exp(u):
    if not isinstance(u, Jet):
        return math.exp(u)
    series = np.empty(u.order + 1)
    term = math.exp(u.value)
    for j in range(u.order + 1):
        series[j] = term
        term /= (j + 1)
    return _apply_series(u, series)


def log(u):
    if not isinstance(u, Jet):
        if u <= 0.0:
            raise DomainError("log of non-positive value %g" % u)
        return math.log(u)
    u0 = u.value
    if u0 <= 0.0:
        raise DomainError("log of jet with non-positive value part %g" % u0)
    series = np.empty(u.order + 1)
    series[0] = math.log(u0)
    sign = 1.0
    for j in range(1, u.order + 1):
        series[j] = sign / (j * u0 ** j)
        sign = -sign
    return _apply_series(u, series)


def sqrt(u):
    if not isinstance(u, Jet):
        if u <= 0.0:
            raise DomainError("sqrt of non-positive value %g" % u)
        return math.sqrt(u)
    u0 = u.value
    if u0 <= 0.0:
        raise DomainError("sqrt of jet with non-positive value part %g" % u0)
    series = np.empty(u.order + 1)
    term = math.sqrt(u0)
    for j in range(u.order + 1):
        series[j] = term
        term *= (0.5 - j) / ((j + 1) * u0)
    return _apply_series(u, series)


def sin(u):
    if not isinstance(u, Jet):
        return math.sin(u)
    s, c = math.sin(u.value), math.cos(u.value)
    cycle = (s, c, -s, -c)
    series = np.empty(u.order + 1)
    fact = 1.0
    for j in range(u.order + 1):
        if j > 0:
            fact *= j
        series[j] = cycle[j % 4] / fact
    return _apply_series(u, series)


def cos(u):
    if not isinstance(u, Jet):
        return math.cos(u)
    s, c = math.sin(u.value), math.cos(u.value)
    cycle = (c, -s, -c, s)
    series = np.empty(u.order + 1)
    fact = 1.0
    for j in range(u.order + 1):
        if j > 0:
            fact *= j
        series[j] = cycle[j % 4] / fact
    return _apply_series(u, series)


def atan(u):
    if not isinstance(u, Jet):
        return math.atan(u)
    phi = math.atan(u.value)
    cphi = math.cos(phi)
    series = np.empty(u.order + 1)
    series[0] = phi
    cpow = 1.0
    for j in range(1, u.order + 1):
        cpow *= cphi
        series[j] = cpow * math.sin(j * (phi + 0.5 * math.pi)) / j
    return _apply_series(u, series)


FUNCTIONS = {"exp": exp, "log": log, "sin": sin, "cos": cos, "sqrt": sqrt,
             "atan": atan}


def jet_linear_solve(A, b):
    """Solve A x = b for jet vectors by Gaussian elimination.

    Pivots on value parts; a best pivot below 1e-12 times the largest entry
    magnitude raises SingularSystem (degenerate point upstream).
    """
    rows = [list(r) for r in A]
    m = len(rows)
    if any(len(r) != m for r in rows) or len(b) != m:
        raise ValueError("jet_linear_solve needs a square system")
    rhs = list(b)
    scale = max((abs(e.value) for r in rows for e in r), default=0.0)
    floor = 1e-12 * scale
    for col in range(m):
        piv = max(range(col, m), key=lambda r: abs(rows[r][col].value))
        if abs(rows[piv][col].value) <= floor:
            raise SingularSystem(
                "pivot %g below floor %g in column %d"
                % (rows[piv][col].value, floor, col)
            )
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = _reciprocal(rows[col][col])
        for r in range(m):
            if r == col:
                continue
            f = rows[r][col] * inv
            for c in range(col, m):
                rows[r][c] = rows[r][c] - f * rows[col][c]
            rhs[r] = rhs[r] - f * rhs[col]
    return [rhs[i] * _reciprocal(rows[i][i]) for i in range(m)]


def directional_derivative(f: Jet, v) -> Jet:
    """Derivative of f along the vector v (components jets or scalars)."""
    if f.order == 0:
        raise OrderExhausted("directional derivative needs order >= 1")
    out = None
    for axis in range(f.dim):
        term = f.derivative(axis)
        vc = v[axis]
        if isinstance(vc, Jet):
            if vc.order > term.order:
                vc = vc.truncate(term.order)
            elif vc.order < term.order:
                term = term.truncate(vc.order)
        term = term * vc
        out = term if out is None else out + term
    return out
