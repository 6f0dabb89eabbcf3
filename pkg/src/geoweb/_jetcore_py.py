"""Pure-Python twin of the compiled jet kernels.

Used when the compiled extension is unavailable or when the backend is
forced via GEOWEB_JET_BACKEND=python.  Accumulation order matches the
compiled loops (``np.add.at`` applies repeated indices sequentially), so
both backends produce bit-identical coefficients.
"""

import numpy as np

BACKEND_NAME = "python"


def mul(a, b, ia, ib, io, nout):
    """Truncated product of two coefficient vectors.

    ``(ia, ib, io)`` enumerate every pair of monomials whose product stays
    within the truncation order; entry t adds ``a[ia[t]] * b[ib[t]]`` into
    slot ``io[t]``.
    """
    out = np.zeros(nout)
    np.add.at(out, io, a[ia] * b[ib])
    return out


def compose(u, series, ia, ib, io, nout):
    """Evaluate sum_j series[j] * (u - u0)^j, truncated.

    ``series`` holds the scaled derivatives of the outer function at the
    value part of ``u``.  Powers are accumulated in ascending degree so a
    lower-order run is an exact prefix of a higher-order one.
    """
    out = np.zeros(nout)
    out[0] = series[0]
    if len(series) == 1:
        return out
    utilde = u.copy()
    utilde[0] = 0.0
    power = utilde.copy()
    out += series[1] * power
    for j in range(2, len(series)):
        power = mul(power, utilde, ia, ib, io, nout)
        out += series[j] * power
    return out
