"""JSON web-file loading with field-path diagnostics.

A web file describes a chart: dimension, the list of defining expressions,
a domain ball for sampling, optionally a pointed foliation and labels.
Schema violations raise WebFileError naming the offending field; malformed
expressions keep their byte offset from the expression parser.
"""

from __future__ import annotations

import hashlib
import json
from numbers import Real

from . import expr
from .errors import ExpressionError, WebFileError
from .web import WebChart

_TOP_KEYS = {"dimension", "functions", "pointed", "domain", "labels"}
_DOMAIN_KEYS = {"center", "radius"}


def _require(cond: bool, message: str, field: str):
    if not cond:
        raise WebFileError(message, field)


def parse_webfile(text: str, name: str = "<webfile>") -> WebChart:
    """Build a WebChart from JSON text; `name` only decorates messages."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise WebFileError("%s is not valid JSON: %s" % (name, e), "") \
            from None
    _require(isinstance(data, dict), "top level must be a JSON object", "")
    for key in data:
        _require(key in _TOP_KEYS, "unknown key %r" % key, key)

    _require("dimension" in data, "missing key", "dimension")
    n = data["dimension"]
    _require(isinstance(n, int) and not isinstance(n, bool) and n >= 2,
             "dimension must be an integer >= 2", "dimension")

    _require("functions" in data, "missing key", "functions")
    funcs = data["functions"]
    _require(isinstance(funcs, list), "functions must be a list", "functions")
    _require(len(funcs) >= n + 2,
             "need at least n+2 = %d functions, got %d"
             % (n + 2, len(funcs)), "functions")
    for k, src in enumerate(funcs):
        _require(isinstance(src, str), "expression must be a string",
                 "functions[%d]" % k)

    pointed = data.get("pointed")
    if pointed is not None:
        _require(isinstance(pointed, int) and not isinstance(pointed, bool),
                 "pointed must be an integer", "pointed")
        _require(1 <= pointed <= len(funcs),
                 "pointed index %d out of range 1..%d"
                 % (pointed, len(funcs)), "pointed")

    _require("domain" in data, "missing key", "domain")
    dom = data["domain"]
    _require(isinstance(dom, dict), "domain must be an object", "domain")
    for key in dom:
        _require(key in _DOMAIN_KEYS, "unknown key %r" % key,
                 "domain.%s" % key)
    _require("center" in dom, "missing key", "domain.center")
    center = dom["center"]
    _require(isinstance(center, list) and len(center) == n
             and all(isinstance(x, Real) and not isinstance(x, bool)
                     for x in center),
             "center must be a list of %d numbers" % n, "domain.center")
    _require("radius" in dom, "missing key", "domain.radius")
    radius = dom["radius"]
    _require(isinstance(radius, Real) and not isinstance(radius, bool)
             and radius > 0, "radius must be a positive number",
             "domain.radius")

    labels = data.get("labels")
    if labels is not None:
        _require(isinstance(labels, list) and len(labels) == len(funcs)
                 and all(isinstance(s, str) for s in labels),
                 "labels must list one string per function", "labels")

    trees = []
    for k, src in enumerate(funcs):
        try:
            trees.append(expr.parse_expression(src, n))
        except ExpressionError as e:
            raise WebFileError(
                "bad expression at offset %d: %s" % (e.offset, e),
                "functions[%d]" % k) from None
    return WebChart(n, trees, [str(s) for s in funcs], pointed,
                    [float(x) for x in center], float(radius),
                    None if labels is None else list(labels))


def load_webfile(path) -> WebChart:
    """Load and validate a JSON web file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise WebFileError("cannot read %s: %s" % (path, e), "") from None
    return parse_webfile(text, name=str(path))


def input_digest(path) -> str:
    """sha256 hex digest of the raw file bytes, for report headers."""
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()
