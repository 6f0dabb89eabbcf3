"""Parser and jet evaluator for web-function expressions.

Grammar (precedence low to high): `+ -`, `* /`, unary minus, `^`
(right-associative), atoms.  Variables are x1..xn; functions are exp, log,
sin, cos, sqrt, atan; literals are decimal or scientific.  Trees are
immutable; the canonical printer is a fixed point under reparsing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from . import jets
from .errors import (ArityError, ExpressionSyntaxError, UnknownIdentifier,
                     VariableOutOfRange)
from .jets import Jet


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    axis: int  # 0-based; prints as x{axis+1}


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Call]

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)
_VAR_RE = re.compile(r"x([0-9]+)\Z")


def _tokenize(source):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExpressionSyntaxError(
                "unexpected character %r" % source[pos], offset=pos)
        if m.lastgroup == "num":
            tokens.append(("num", float(m.group()), pos))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group(), pos))
        else:
            tokens.append((m.group(), m.group(), pos))
        pos = m.end()
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens, dim):
        self.tokens = tokens
        self.dim = dim
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            raise ExpressionSyntaxError(
                "expected %r, found %s" % (kind, self._describe(tok)),
                offset=tok[2])
        return self.advance()

    @staticmethod
    def _describe(tok):
        return "end of input" if tok[0] == "end" else repr(str(tok[1]))

    def parse(self):
        node = self.sum()
        tok = self.tokens[self.pos]
        if tok[0] != "end":
            raise ExpressionSyntaxError(
                "unexpected %s" % self._describe(tok), offset=tok[2])
        return node

    def sum(self):
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.advance()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.advance()[0]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek() == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.advance()
            # exponent re-enters at unary level: right-associative, and
            # x^-2 is legal
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, value, offset = self.advance()
        if kind == "num":
            return Const(value)
        if kind == "(":
            node = self.sum()
            self.expect(")")
            return node
        if kind == "ident":
            var = _VAR_RE.match(value)
            if var is not None:
                idx = int(var.group(1))
                if not 1 <= idx <= self.dim:
                    raise VariableOutOfRange(
                        "variable %s out of range for dimension %d"
                        % (value, self.dim), offset=offset)
                return Var(idx - 1)
            if value in jets.FUNCTIONS:
                if self.peek() != "(":
                    raise ArityError(
                        "function %r needs a parenthesized argument" % value,
                        offset=offset)
                self.advance()
                args = [self.sum()]
                while self.peek() == ",":
                    self.advance()
                    args.append(self.sum())
                self.expect(")")
                if len(args) != 1:
                    raise ArityError(
                        "function %r takes one argument, got %d"
                        % (value, len(args)), offset=offset)
                return Call(value, args[0])
            raise UnknownIdentifier("unknown identifier %r" % value,
                                    offset=offset)
        raise ExpressionSyntaxError(
            "expected an operand, found %s" % self._describe((kind, value, offset)),
            offset=offset)


def parse_expression(source: str, dim: int) -> Node:
    if not source or source.isspace():
        raise ExpressionSyntaxError("empty expression", offset=0)
    return _Parser(_tokenize(source), dim).parse()


# printer precedence; parenthesize a child whose level is too low for its slot
_LEVEL = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _fmt_const(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _print(node, parent_level):
    if isinstance(node, Const):
        text = _fmt_const(node.value)
        level = 5 if node.value >= 0 else 3
    elif isinstance(node, Var):
        text, level = "x%d" % (node.axis + 1), 5
    elif isinstance(node, Call):
        text, level = "%s(%s)" % (node.fn, _print(node.arg, 0)), 5
    elif isinstance(node, Neg):
        level = _LEVEL["neg"]
        text = "-" + _print(node.arg, level)
    else:
        level = _LEVEL[node.op]
        if node.op in ("+", "-"):
            left = _print(node.left, level)
            right = _print(node.right, level + 1)
            text = "%s %s %s" % (left, node.op, right)
        elif node.op in ("*", "/"):
            left = _print(node.left, level)
            right = _print(node.right, level + 1)
            text = "%s%s%s" % (left, node.op, right)
        else:  # ^ is right-associative: parenthesize the left on ties
            left = _print(node.left, level + 1)
            right = _print(node.right, _LEVEL["neg"])
            text = "%s^%s" % (left, right)
    if level < parent_level:
        return "(%s)" % text
    return text


def print_expression(node: Node) -> str:
    """Canonical text form; parse(print(parse(s))) == parse(s)."""
    return _print(node, 0)


def eval_field(node: Node, point, order: int) -> Jet:
    """Jet of the expression at `point`, truncated at `order`."""
    dim = len(point)
    res = _eval(node, point, dim, order)
    if not isinstance(res, Jet):
        res = Jet.constant(float(res), dim, order)
    return res


def _eval(node, point, dim, order):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return Jet.variable(node.axis, float(point[node.axis]), dim, order)
    if isinstance(node, Neg):
        return -_eval(node.arg, point, dim, order)
    if isinstance(node, Call):
        return jets.FUNCTIONS[node.fn](_eval(node.arg, point, dim, order))
    left = _eval(node.left, point, dim, order)
    right = _eval(node.right, point, dim, order)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        return left / right
    return left ** right
