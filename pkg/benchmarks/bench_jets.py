#!/usr/bin/env python3
"""Compare the compiled jet kernel against its pure-Python twin.

Times the raw product / composition kernels at a few (dim, order)
combinations, then a full canonical-connection build with each backend
swapped in, and prints one table.  Both backends share the layout
tables, so the timings isolate the kernel implementation.

Usage:
    python benchmarks/bench_jets.py [--repeat N]
"""

import argparse
import time

import numpy as np

from geoweb import connection, jets
from geoweb import _jetcore_py
from geoweb.web import WebChart

try:
    from geoweb import _jetcore
except ImportError:
    _jetcore = None


def best_of(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_raw(core, dim, order, inner, repeat):
    tb = jets._tables(dim, order)
    rng = np.random.default_rng(0)
    a = rng.standard_normal(tb.count)
    b = rng.standard_normal(tb.count)
    series = rng.standard_normal(order + 1)

    def run_mul():
        for _ in range(inner):
            core.mul(a, b, tb.ia, tb.ib, tb.io, tb.count)

    def run_compose():
        for _ in range(inner):
            core.compose(a, series, tb.ia, tb.ib, tb.io, tb.count)

    return (best_of(run_mul, repeat) / inner,
            best_of(run_compose, repeat) / inner)


def bench_structure(core, repeat):
    web = WebChart.from_strings(
        2, ["x1", "x2", "-(x1+x2)", "x1+2*x2+x1*x2"], radius=0.5)
    pts = [(0.1, 0.2), (-0.2, 0.1), (0.05, -0.15), (0.25, 0.2)]
    old = jets._core
    jets._core = core
    try:
        def run():
            for p in pts:
                connection.canonical_structure(web, p, order=4)
        return best_of(run, repeat) / len(pts)
    finally:
        jets._core = old


def fmt(seconds):
    if seconds < 1e-3:
        return "%8.2f us" % (seconds * 1e6)
    return "%8.3f ms" % (seconds * 1e3)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7,
                    help="timing repetitions per case (default 7)")
    args = ap.parse_args()

    if _jetcore is None:
        print("compiled kernel not built; timing the python backend only")
    backends = [("python", _jetcore_py)]
    if _jetcore is not None:
        backends.insert(0, ("compiled", _jetcore))

    cases = [(2, 2), (2, 4), (3, 3), (3, 4), (4, 4)]
    print("%-12s %4s %6s %12s %12s %9s" %
          ("kernel", "dim", "order", "compiled", "python", "speedup"))
    for dim, order in cases:
        inner = 200 if order < 4 else 50
        results = {name: bench_raw(core, dim, order, inner, args.repeat)
                   for name, core in backends}
        for idx, op in enumerate(("mul", "compose")):
            comp = results.get("compiled", (None, None))[idx]
            py = results["python"][idx]
            ratio = "" if comp is None else "%8.1fx" % (py / comp)
            print("%-12s %4d %6d %12s %12s %9s" %
                  (op, dim, order,
                   "" if comp is None else fmt(comp), fmt(py), ratio))

    struct = {name: bench_structure(core, args.repeat)
              for name, core in backends}
    comp = struct.get("compiled")
    py = struct["python"]
    ratio = "" if comp is None else "%8.1fx" % (py / comp)
    print("%-12s %4d %6d %12s %12s %9s" %
          ("connection", 2, 4,
           "" if comp is None else fmt(comp), fmt(py), ratio))


if __name__ == "__main__":
    main()
