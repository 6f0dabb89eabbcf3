"""Command-line front end.

Subcommands:
  check       geodesicity verdict over a point sample
  connection  canonical connection data at a single point
  linearize   linearizability verdict over a point sample
  geodesic    integrate one geodesic and report leaf drift
  invariants  per-point table of basis-invariant classes and skew invariants

Exit codes: 0 affirmative verdict (or plain success), 2 negative verdict,
3 inconclusive, 1 input or runtime error.  Reports are deterministic:
identical inputs, flags and seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, connection, curvature, fastgamma, geodesics, \
    invariants, sampling, webfile
from .errors import (DegenerateWebPoint, DomainError, ExpressionError,
                     GeowebError, StepTooLarge, WebFileError)
from .report import Report, write_report
from .web import basis_invariants, normalize_coframe, pointed_chart

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2
EXIT_INCONCLUSIVE = 3

_VERDICT_EXIT = {
    "geodesic": EXIT_OK,
    "linearizable": EXIT_OK,
    "not_geodesic": EXIT_NEGATIVE,
    "not_linearizable": EXIT_NEGATIVE,
    "inconclusive": EXIT_INCONCLUSIVE,
}


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message)


def thread_count() -> int:
    """Worker cap from GEOWEB_THREADS; 0 or unset means automatic."""
    raw = os.environ.get("GEOWEB_THREADS", "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError:
        raise CLIError("GEOWEB_THREADS must be an integer, got %r" % raw)
    if value < 0:
        raise CLIError("GEOWEB_THREADS must be >= 0")
    if value == 0:
        return min(8, os.cpu_count() or 1)
    return value


def _parallel_map(fn, items):
    """Order-preserving map honoring the thread cap."""
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _parse_coords(text: str, n: int, flag: str) -> np.ndarray:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise CLIError("%s expects numbers, got %r" % (flag, text))
    if len(vals) != n:
        raise CLIError("%s expects %d coordinates, got %d"
                       % (flag, n, len(vals)))
    return np.array(vals)


def _add_common(sub, sample=True):
    sub.add_argument("webfile", help="path to a JSON web file")
    sub.add_argument("--out", default=None, help="write the report here "
                     "instead of stdout")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    if sample:
        g = sub.add_mutually_exclusive_group()
        g.add_argument("--grid", type=int, default=None, metavar="K",
                       help="K^n lattice in the domain ball (default 3)")
        g.add_argument("--random", type=int, default=None, metavar="N",
                       help="N seeded uniform points in the domain ball")
        sub.add_argument("--seed", type=int, default=0,
                         help="PRNG seed for --random (default 0)")


def build_parser() -> _Parser:
    p = _Parser(prog="geoweb", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version",
                   version="geoweb %s" % __version__)
    subs = p.add_subparsers(dest="command", required=True)

    _add_common(subs.add_parser(
        "check", help="test whether the web is geodesic"))
    c = subs.add_parser("connection",
                        help="canonical connection at a point")
    _add_common(c, sample=False)
    c.add_argument("--at", required=True, metavar="COORDS",
                   help="evaluation point, e.g. '0.1,-0.2'")
    c.add_argument("--gauge", choices=("zero", "pointed"), default="zero")
    _add_common(subs.add_parser(
        "linearize", help="test local linearizability"))
    g = subs.add_parser("geodesic", help="integrate one geodesic")
    _add_common(g, sample=False)
    g.add_argument("--from", dest="start", required=True, metavar="COORDS")
    g.add_argument("--leaf", type=int, required=True, metavar="I",
                   help="1-based foliation index; the start velocity is "
                   "projected tangent to its leaf")
    g.add_argument("--dir", default=None, metavar="COORDS",
                   help="direction before projection (default all-ones)")
    g.add_argument("--T", type=float, default=1.0, help="time horizon")
    g.add_argument("--h", type=float, default=1e-3, help="RK4 step")
    _add_common(subs.add_parser(
        "invariants", help="table of basis and skew invariants"))
    return p


def _sample(web, args):
    if args.random is not None:
        pts = sampling.random_points(web, args.random, args.seed)
        meta = {"sampling": "random", "count": args.random,
                "seed": args.seed}
    else:
        k = args.grid if args.grid is not None else 3
        pts = sampling.grid_points(web, k)
        meta = {"sampling": "grid", "grid": k, "count": len(pts)}
    return pts, meta


def _base_meta(args, web):
    return {
        "tool": "geoweb",
        "version": __version__,
        "input": os.path.basename(args.webfile),
        "sha256": webfile.input_digest(args.webfile),
        "dimension": web.dim,
        "functions": web.d,
    }


def _point_columns(web):
    return ["x%d" % (a + 1) for a in range(web.dim)]


def _sample_rows(rep):
    rows = []
    for r in rep.rows:
        rows.append([r.index] + [float(x) for x in r.point]
                    + [r.status,
                       float(r.value) if r.status == "ok" else "",
                       float(r.scale) if r.status == "ok" else "",
                       r.detail])
    return rows


def _cmd_check(args) -> int:
    web = webfile.load_webfile(args.webfile)
    pts, smeta = _sample(web, args)
    rep = invariants.geodesicity_test(web, pts)
    meta = {**_base_meta(args, web), **smeta,
            "max_discrepancy": rep.max_value,
            "excluded_fraction": rep.excluded_fraction}
    out = Report("check", meta,
                 ["index"] + _point_columns(web)
                 + ["status", "discrepancy", "scale", "detail"],
                 _sample_rows(rep), rep.verdict, list(rep.notes))
    text = write_report(out, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return _VERDICT_EXIT[rep.verdict]


def _cmd_linearize(args) -> int:
    web = webfile.load_webfile(args.webfile)
    pts, smeta = _sample(web, args)
    rep = curvature.linearizability_verdict(web, pts)
    meta = {**_base_meta(args, web), **smeta,
            "obstruction": "cotton" if web.dim == 2 else "weyl",
            "max_obstruction": rep.max_value,
            "excluded_fraction": rep.excluded_fraction}
    out = Report("linearize", meta,
                 ["index"] + _point_columns(web)
                 + ["status", "obstruction", "scale", "detail"],
                 _sample_rows(rep), rep.verdict, list(rep.notes))
    text = write_report(out, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return _VERDICT_EXIT[rep.verdict]


def _cmd_connection(args) -> int:
    web = webfile.load_webfile(args.webfile)
    point = _parse_coords(args.at, web.dim, "--at")
    work = pointed_chart(web) if args.gauge == "pointed" else web
    struct = connection.canonical_structure(work, point)
    n = web.dim
    rows = []
    for k in range(n + 2, work.d + 1):
        inv = (struct.invariant if k == n + 2
               else basis_invariants(struct.cof, work, k))
        cls = inv.projective_class()
        for i in range(n):
            rows.append(["a", k, i + 1, "", float(inv.a[i].value)])
        for i in range(n):
            rows.append(["a_class", k, i + 1, "", float(cls[i])])
    for i in range(n):
        for j in range(n):
            rows.append(["theta", "", i + 1, j + 1,
                         float(struct.theta.theta[i][j].value)])
    for k in range(n):
        for p_ in range(n):
            for q in range(n):
                rows.append(["frame_gamma", k + 1, p_ + 1, q + 1,
                             float(struct.conn.frame_gamma[k][p_][q].value)])
    gv = struct.conn.gamma_values()
    for c in range(n):
        for a in range(n):
            for b in range(n):
                rows.append(["coord_gamma", c + 1, a + 1, b + 1,
                             float(gv[c, a, b])])
    meta = {**_base_meta(args, web),
            "point": ",".join("%.17g" % x for x in point),
            "gauge": args.gauge}
    out = Report("connection", meta,
                 ["section", "k", "i", "j", "value"], rows)
    text = write_report(out, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_geodesic(args) -> int:
    web = webfile.load_webfile(args.webfile)
    n = web.dim
    x0 = _parse_coords(args.start, n, "--from")
    if not 1 <= args.leaf <= web.d:
        raise CLIError("--leaf must be in 1..%d" % web.d)
    direction = (np.ones(n) if args.dir is None
                 else _parse_coords(args.dir, n, "--dir"))
    v0 = geodesics.tangent_vector(web, args.leaf, x0, direction)
    gamma = fastgamma.batched_gamma_evaluator(web)
    traj = geodesics.integrate_geodesic(gamma, x0, v0, args.T, args.h)
    drift = geodesics.leaf_drift(web, args.leaf, traj)
    values = [fastgamma.batched_values(tree, traj.states)
              for tree in web.functions]
    names = (web.labels if web.labels is not None
             else ["f%d" % (k + 1) for k in range(web.d)])
    rows = []
    for s in range(len(traj.times)):
        rows.append([float(traj.times[s])]
                    + [float(x) for x in traj.states[s]]
                    + [float(v[s]) for v in values])
    meta = {**_base_meta(args, web),
            "from": ",".join("%.17g" % x for x in x0),
            "leaf": args.leaf,
            "tangent": ",".join("%.17g" % x for x in v0),
            "T": args.T, "h": traj.step, "steps": len(traj.times) - 1,
            "drift": drift}
    out = Report("geodesic", meta,
                 ["t"] + _point_columns(web) + list(names), rows)
    text = write_report(out, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def _invariant_row(web, task):
    idx, point = task
    n = web.dim
    extras = range(n + 2, web.d + 1)
    head = [idx] + [float(x) for x in point]
    pad = len(extras) * n + len(extras) * (n * (n - 1)) // 2
    try:
        cof = normalize_coframe(web, point, order=2)
        invs = {k: basis_invariants(cof, web, k) for k in extras}
        body = []
        for k in extras:
            body.extend(float(c) for c in invs[k].projective_class())
        for k in extras:
            for i in range(n):
                for j in range(i + 1, n):
                    s = connection.skew_invariant(cof, invs[k], i, j)
                    body.append(float(s.value))
    except DegenerateWebPoint as e:
        return head + ["degenerate"] + [""] * pad + [str(e)]
    return head + ["ok"] + body + [""]


def _cmd_invariants(args) -> int:
    web = webfile.load_webfile(args.webfile)
    pts, smeta = _sample(web, args)
    n = web.dim
    extras = range(n + 2, web.d + 1)
    cols = ["index"] + _point_columns(web) + ["status"]
    for k in extras:
        cols.extend("a%d_%d" % (k, i + 1) for i in range(n))
    for k in extras:
        cols.extend("s%d_%d%d" % (k, i + 1, j + 1)
                    for i in range(n) for j in range(i + 1, n))
    cols.append("detail")
    rows = _parallel_map(lambda task: _invariant_row(web, task),
                         list(enumerate(pts)))
    meta = {**_base_meta(args, web), **smeta}
    out = Report("invariants", meta, cols, rows)
    text = write_report(out, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "check": _cmd_check,
    "connection": _cmd_connection,
    "linearize": _cmd_linearize,
    "geodesic": _cmd_geodesic,
    "invariants": _cmd_invariants,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except CLIError as e:
        sys.stderr.write("geoweb: error: %s\n" % e)
        return EXIT_ERROR
    except (WebFileError, ExpressionError, ValueError) as e:
        sys.stderr.write("geoweb: invalid input: %s\n" % e)
        return EXIT_ERROR
    except (DegenerateWebPoint, StepTooLarge, DomainError) as e:
        sys.stderr.write("geoweb: computation failed: %s\n" % e)
        return EXIT_ERROR
    except GeowebError as e:
        sys.stderr.write("geoweb: %s\n" % e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
