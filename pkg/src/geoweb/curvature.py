"""Curvature tensors and the linearizability obstruction.

The canonical connection of a geodesic web is projectively flat exactly
when the web is locally a web of hyperplanes.  Projective flatness is
measured by the Weyl tensor for n >= 3 and by the third-order Cotton-type
obstruction for n = 2; both vanish on the whole projective class of a flat
connection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .connection import ConnectionField, canonical_structure
from .errors import DegenerateWebPoint, OrderExhausted
from .invariants import (FAIL_FACTOR, PointRow, SampleReport, aggregate_rows,
                         classify, geodesicity_test)
from .jets import Jet
from .web import WebChart

LINEARIZABLE_PASS_FACTOR = 1e-7


def riemann(conn: ConnectionField):
    """Jet-valued R^i_jkl = d_k G^i_lj - d_l G^i_kj + G G - G G terms."""
    n = conn.dim
    if conn.order < 1:
        raise OrderExhausted(
            "curvature needs connection jets of order >= 1, have %d"
            % conn.order)
    g = conn.gamma
    r = conn.order - 1
    gt = [[[g[c][a][b].truncate(r) for b in range(n)] for a in range(n)]
          for c in range(n)]
    R = [[[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    zero = Jet.constant(0.0, n, r)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(k, n):
                    if l == k:
                        R[i][j][k][k] = zero
                        continue
                    term = g[i][l][j].derivative(k) - g[i][k][j].derivative(l)
                    for m in range(n):
                        term = term + (gt[i][k][m] * gt[m][l][j]
                                       - gt[i][l][m] * gt[m][k][j])
                    R[i][j][k][l] = term
                    R[i][j][l][k] = -term
    return R


@dataclass
class CurvaturePack:
    """Curvature values at a point; weyl for n >= 3, cotton for n = 2."""
    point: np.ndarray
    riemann: np.ndarray         # (n, n, n, n)
    ricci: np.ndarray           # (n, n)
    schouten: np.ndarray        # (n, n)
    weyl: Optional[np.ndarray]
    cotton: Optional[np.ndarray]

    def obstruction_norm(self) -> float:
        obs = self.weyl if self.weyl is not None else self.cotton
        return float(np.abs(obs).max())

    def scale(self) -> float:
        return max(1.0, float(np.abs(self.riemann).max()))


def projective_pack(conn: ConnectionField, R=None) -> CurvaturePack:
    """Ricci, projective Schouten, and the flatness obstruction.

    For n = 2 the obstruction is Y_jkl = nabla_k P_jl - nabla_l P_jk, which
    needs connection jets of order >= 2 (one more derivative than Weyl).
    """
    n = conn.dim
    if R is None:
        R = riemann(conn)
    ric = [[None] * n for _ in range(n)]
    for j in range(n):
        for l in range(n):
            acc = R[0][j][0][l]
            for i in range(1, n):
                acc = acc + R[i][j][i][l]
            ric[j][l] = acc
    P = [[(n * ric[j][l] + ric[l][j]) / (n * n - 1.0) for l in range(n)]
         for j in range(n)]
    Rv = np.array([[[[R[i][j][k][l].value for l in range(n)]
                     for k in range(n)] for j in range(n)] for i in range(n)])
    ricv = np.array([[ric[j][l].value for l in range(n)] for j in range(n)])
    Pv = np.array([[P[j][l].value for l in range(n)] for j in range(n)])
    weyl = cotton = None
    if n >= 3:
        weyl = np.empty((n, n, n, n))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        w = Rv[i, j, k, l]
                        if i == k:
                            w -= Pv[j, l]
                        if i == l:
                            w += Pv[j, k]
                        if i == j:
                            w -= Pv[k, l] - Pv[l, k]
                        weyl[i, j, k, l] = w
    else:
        ro = conn.order - 1   # jet order of P
        if ro < 1:
            raise OrderExhausted(
                "the n = 2 obstruction needs connection jets of order >= 2")
        g = conn.gamma
        gt = [[[g[c][a][b].truncate(ro - 1) for b in range(n)]
               for a in range(n)] for c in range(n)]
        Pt = [[P[j][l].truncate(ro - 1) for l in range(n)] for j in range(n)]

        def nabla(k, j, l):
            acc = P[j][l].derivative(k)
            for m in range(n):
                acc = acc - gt[m][k][j] * Pt[m][l] - gt[m][k][l] * Pt[j][m]
            return acc

        cotton = np.zeros((n, n, n))
        for j in range(n):
            for k in range(n):
                for l in range(k + 1, n):
                    y = (nabla(k, j, l) - nabla(l, j, k)).value
                    cotton[j, k, l] = y
                    cotton[j, l, k] = -y
    return CurvaturePack(conn.point, Rv, ricv, Pv, weyl, cotton)


def linearizability_verdict(web: WebChart, points,
                            order: Optional[int] = None) -> SampleReport:
    """Geodesicity plus obstruction-vanishing test over a point sample.

    Verdict 'linearizable' when the web is geodesic and the obstruction
    norm stays below 1e-7 times the curvature scale at every admissible
    point; 'not_linearizable' when geodesicity fails or the obstruction
    exceeds 1e-3 times the scale.
    """
    n = web.dim
    if order is None:
        order = 4 if n == 2 else 3
    geo = geodesicity_test(web, points) if web.d > n + 2 else None
    rows = []
    verdicts = []
    for idx, pt in enumerate(points):
        pt = np.asarray(pt, dtype=float)
        try:
            st = canonical_structure(web, pt, order)
            pack = projective_pack(st.conn)
            obs = pack.obstruction_norm()
            scale = pack.scale()
            rows.append(PointRow(idx, pt, "ok", obs, scale))
            verdicts.append(classify(obs, scale, LINEARIZABLE_PASS_FACTOR,
                                     FAIL_FACTOR))
        except DegenerateWebPoint as e:
            rows.append(PointRow(idx, pt, "degenerate", detail=str(e)))
    rep = aggregate_rows("linearizability", rows, verdicts, "linearizable",
                         "not_linearizable")
    rep.geodesicity = geo
    if geo is not None:
        rep.notes.append("geodesicity: %s" % geo.verdict)
        if geo.verdict == "not_geodesic":
            rep.verdict = "not_linearizable"
        elif geo.verdict == "inconclusive" and rep.verdict == "linearizable":
            rep.verdict = "inconclusive"
    return rep
