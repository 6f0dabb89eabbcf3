# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled jet kernels: truncated multiplication and series composition.

The accumulation order is the table order, matching the pure-Python twin
(which relies on np.add.at applying repeated indices sequentially), so the
two backends agree bit for bit.
"""

import numpy as np

BACKEND_NAME = "compiled"


def mul(double[::1] a, double[::1] b, int[::1] ia, int[::1] ib, int[::1] io,
        Py_ssize_t nout):
    cdef Py_ssize_t t, nt = ia.shape[0]
    out_arr = np.zeros(nout)
    cdef double[::1] out = out_arr
    for t in range(nt):
        out[io[t]] += a[ia[t]] * b[ib[t]]
    return out_arr


def compose(double[::1] u, double[::1] series, int[::1] ia, int[::1] ib,
            int[::1] io, Py_ssize_t nout):
    cdef Py_ssize_t i, j, t, nt = ia.shape[0], ns = series.shape[0]
    out_arr = np.zeros(nout)
    cdef double[::1] out = out_arr
    out[0] = series[0]
    if ns == 1:
        return out_arr
    utilde_arr = np.asarray(u).copy()
    utilde_arr[0] = 0.0
    cdef double[::1] utilde = utilde_arr
    power_arr = utilde_arr.copy()
    cdef double[::1] power = power_arr
    cdef double[::1] nxt
    for i in range(nout):
        out[i] += series[1] * power[i]
    for j in range(2, ns):
        nxt_arr = np.zeros(nout)
        nxt = nxt_arr
        for t in range(nt):
            nxt[io[t]] += power[ia[t]] * utilde[ib[t]]
        power = nxt
        for i in range(nout):
            out[i] += series[j] * power[i]
    return out_arr
