"""Batched value-level pipeline for canonical Christoffels (gauge t = 0).

Geodesic integration evaluates the connection thousands of times, which is
too slow through per-point jet objects.  This module re-derives the same
quantities with plain numpy over a batch of points: order-2 coefficient
arrays for the web functions, then explicit matrix calculus for lambda,
the frame, the structure functions, the skew invariants and the coordinate
Christoffels.  A cross-validation test pins it bitwise-close to the jet
route, so the two paths double as mutual oracles.
"""

from __future__ import annotations

import math

import numpy as np

from . import expr, jets
from .errors import DegenerateWebPoint, DomainError
from .web import DEGENERACY_FLOOR, WebChart
from .connection import COINCIDENCE_FLOOR

# ---------------------------------------------------------------------------
# batched truncated-series evaluation: coefficient arrays of shape (count, B)


def _bmul(a, b, tb):
    out = np.zeros_like(a)
    np.add.at(out, tb.io, a[tb.ia] * b[tb.ib])
    return out


def _bcompose(u, series, tb):
    out = np.zeros_like(u)
    out[0] = series[0]
    if len(series) == 1:
        return out
    ut = u.copy()
    ut[0] = 0.0
    power = ut.copy()
    out += series[1] * power
    for j in range(2, len(series)):
        power = _bmul(power, ut, tb)
        out += series[j] * power
    return out


def _brecip(u, tb, order):
    u0 = u[0]
    if np.any(u0 == 0.0):
        raise DomainError("division by zero value part in batch")
    series = np.empty((order + 1,) + u0.shape)
    term = 1.0 / u0
    for j in range(order + 1):
        series[j] = term
        term = -term / u0
    return _bcompose(u, series, tb)


def _bfun(name, u, tb, order):
    u0 = u[0]
    series = np.empty((order + 1,) + u0.shape)
    if name == "exp":
        term = np.exp(u0)
        for j in range(order + 1):
            series[j] = term
            term = term / (j + 1)
    elif name == "log":
        if np.any(u0 <= 0.0):
            raise DomainError("log of non-positive value in batch")
        series[0] = np.log(u0)
        sign = 1.0
        for j in range(1, order + 1):
            series[j] = sign / (j * u0 ** j)
            sign = -sign
    elif name == "sqrt":
        if np.any(u0 <= 0.0):
            raise DomainError("sqrt of non-positive value in batch")
        term = np.sqrt(u0)
        for j in range(order + 1):
            series[j] = term
            term = term * (0.5 - j) / ((j + 1) * u0)
    elif name in ("sin", "cos"):
        s, c = np.sin(u0), np.cos(u0)
        cycle = (s, c, -s, -c) if name == "sin" else (c, -s, -c, s)
        fact = 1.0
        for j in range(order + 1):
            if j > 0:
                fact *= j
            series[j] = cycle[j % 4] / fact
    elif name == "atan":
        phi = np.arctan(u0)
        cphi = np.cos(phi)
        series[0] = phi
        cpow = np.ones_like(u0)
        for j in range(1, order + 1):
            cpow = cpow * cphi
            series[j] = cpow * np.sin(j * (phi + 0.5 * math.pi)) / j
    else:
        raise ValueError("unknown function %r" % name)
    return _bcompose(u, series, tb)


def _beval(node, X, order):
    """Coefficient array (count, B) of the expression over points X (B, n)."""
    n = X.shape[1]
    tb = jets._tables(n, order)
    B = X.shape[0]

    def rec(nd):
        if isinstance(nd, expr.Const):
            out = np.zeros((tb.count, B))
            out[0] = nd.value
            return out
        if isinstance(nd, expr.Var):
            out = np.zeros((tb.count, B))
            out[0] = X[:, nd.axis]
            if order >= 1:
                out[1 + nd.axis] = 1.0
            return out
        if isinstance(nd, expr.Neg):
            return -rec(nd.arg)
        if isinstance(nd, expr.Call):
            return _bfun(nd.fn, rec(nd.arg), tb, order)
        left = rec(nd.left)
        right = rec(nd.right)
        if nd.op == "+":
            return left + right
        if nd.op == "-":
            return left - right
        if nd.op == "*":
            return _bmul(left, right, tb)
        if nd.op == "/":
            return _bmul(left, _brecip(right, tb, order), tb)
        # power: constant integer exponent by repeated product, else exp/log
        if not np.any(right[1:]):
            e0 = float(right[0, 0])
            if e0 == int(e0):
                k = int(e0)
                base = left if k >= 0 else _brecip(left, tb, order)
                out = np.zeros((tb.count, B))
                out[0] = 1.0
                for _ in range(abs(k)):
                    out = _bmul(out, base, tb)
                return out
        return _bfun("exp", _bmul(right, _bfun("log", left, tb, order), tb),
                     tb, order)

    return rec(node)


def batched_values(tree, X) -> np.ndarray:
    """Function values over a batch of points (order-0 evaluation)."""
    return _beval(tree, np.asarray(X, dtype=float), 0)[0]


def _value_grad_hess(tree, X):
    n = X.shape[1]
    co = _beval(tree, X, 2)
    val = co[0]
    grad = co[1:1 + n].T.copy()          # (B, n)
    exps = jets.exponents(n, 2)
    hess = np.empty((X.shape[0], n, n))
    for idx in range(1 + n, len(exps)):
        e = exps[idx]
        axes = [a for a in range(n) if e[a] > 0]
        if len(axes) == 1:
            a = axes[0]
            hess[:, a, a] = 2.0 * co[idx]
        else:
            a, b = axes
            hess[:, a, b] = co[idx]
            hess[:, b, a] = co[idx]
    return val, grad, hess


def _solve(A, rhs, what):
    try:
        return np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        raise DegenerateWebPoint("%s system is singular in batch" % what) \
            from None


def _check_floor(vals, floor_rel, what):
    # vals (B, k): every component must clear the per-row relative floor
    scale = np.maximum(1.0, np.abs(vals).max(axis=1))
    bad = np.abs(vals) <= floor_rel * scale[:, None]
    if np.any(bad):
        b = int(np.argwhere(bad)[0, 0])
        raise DegenerateWebPoint("%s vanishes at batch row %d" % (what, b))


def batched_gamma_evaluator(web: WebChart):
    """Point batch (B, n) -> coordinate Christoffel values (B, n, n, n).

    Implements the canonical connection with gauge t = 0 for the subweb
    f_1..f_{n+2}; raises DegenerateWebPoint when any point in the batch is
    inadmissible.
    """
    n = web.dim
    trees = web.functions[:n + 2]

    def evaluate(X):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        vgh = [_value_grad_hess(t, X) for t in trees]
        grads = [v[1] for v in vgh]
        hesses = [v[2] for v in vgh]

        A = np.stack(grads[:n], axis=2)              # A[b,a,i] = d_a f_i
        lam = _solve(A, -grads[n][:, :, None],
                     "coframe normalization")[:, :, 0]
        _check_floor(lam, DEGENERACY_FLOOR, "lambda")
        dA = np.stack(hesses[:n], axis=2)            # dA[b,a,i,c]
        rhsd = -hesses[n] - np.einsum("baic,bi->bac", dA, lam)
        dlam = _solve(A, rhsd, "coframe normalization")   # (B,i,c)

        B = X.shape[0]
        lamf = np.concatenate([lam, np.ones((B, 1))], axis=1)
        dlamf = np.concatenate([dlam, np.zeros((B, 1, n))], axis=1)
        Gall = np.stack(grads[:n + 1], axis=1)       # (B, n+1, a)
        Hall = np.stack(hesses[:n + 1], axis=1)      # (B, n+1, a, c)
        Om = lamf[:, :, None] * Gall
        dOm = dlamf[:, :, None, :] * Gall[:, :, :, None] \
            + lamf[:, :, None, None] * Hall

        W = Om[:, :n, :]                             # (B, i, a)
        dW = dOm[:, :n, :, :]                        # (B, i, a, c)
        try:
            V = np.linalg.inv(W)                     # (B, a, j): E[j][a]=V[a,j]
        except np.linalg.LinAlgError:
            raise DegenerateWebPoint("coframe is not invertible in batch") \
                from None
        dV = -np.einsum("bpi,biqc,bqj->bpjc", V, dW, V)
        FD = np.einsum("bpi,bajp->bija", V, dV)      # D_i E[j][a]
        bracket = FD - FD.transpose(0, 2, 1, 3)
        cst = np.einsum("bka,bija->bkij", W, bracket)

        M = W.transpose(0, 2, 1)                     # M[b,a,i] = omega_i[a]
        av = _solve(M, -grads[n + 1][:, :, None],
                    "basis invariant")[:, :, 0]
        _check_floor(av, DEGENERACY_FLOOR, "basis invariant")
        dM = dW.transpose(0, 2, 1, 3)
        rhsa = -hesses[n + 1] - np.einsum("baic,bi->bac", dM, av)
        da = _solve(M, rhsa, "basis invariant")      # (B, i, c)
        Da = np.einsum("bcj,bic->bij", V, da)        # D_j a_i

        theta = np.zeros((B, n, n))
        for i in range(n):
            for j in range(i + 1, n):
                ai, aj = av[:, i], av[:, j]
                den = ai - aj
                scale = np.maximum(1.0, np.maximum(np.abs(ai), np.abs(aj)))
                if np.any(np.abs(den) <= COINCIDENCE_FLOOR * scale):
                    raise DegenerateWebPoint(
                        "basis invariants a_%d and a_%d coincide in batch"
                        % (i + 1, j + 1))
                num = ai * (Da[:, j, j] / aj - Da[:, i, j] / ai) \
                    - aj * (Da[:, j, i] / aj - Da[:, i, i] / ai)
                sij = num / den
                theta[:, i, j] = sij
                theta[:, j, i] = -sij

        fg = np.empty((B, n, n, n))
        for k in range(n):
            for p in range(n):
                for q in range(n):
                    if p == k and q == k:
                        fg[:, k, k, k] = -theta[:, k, k]
                    elif q == k:
                        fg[:, k, p, k] = 0.5 * (cst[:, k, k, p]
                                                - theta[:, k, p])
                    elif p == k:
                        fg[:, k, k, q] = 0.5 * (cst[:, k, q, k]
                                                - theta[:, k, q])
                    else:
                        fg[:, k, p, q] = 0.5 * cst[:, k, q, p]

        H = np.einsum("bkji,bck->bcij", fg, V) - FD.transpose(0, 3, 1, 2)
        G = np.einsum("bia,bjd,bcij->bcad", W, W, H)
        return G[0] if single else G

    return evaluate
