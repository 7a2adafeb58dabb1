"""Surface-definition expression language.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | 'u1' | 'u2' | 'u3' | func '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus and is right-associative; its right
operand must be a constant expression and is folded to a number at parse
time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import jets
from .errors import DomainError, ExpressionSyntaxError, UnknownIdentifier
from .jets import DEFAULT_ORDER, Jet

VARIABLES = ("u1", "u2", "u3")
FUNCTIONS = tuple(jets.FUNCTIONS)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str

    @property
    def index(self):
        return VARIABLES.index(self.name)


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: float


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expression"


Expression = Union[Num, Var, Neg, BinOp, Pow, Call]


def Add(a, b):
    return BinOp("+", a, b)


def Sub(a, b):
    return BinOp("-", a, b)


def Mul(a, b):
    return BinOp("*", a, b)


def Div(a, b):
    return BinOp("/", a, b)


_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(source):
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if not m:
            raise ExpressionSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            for k, ch in enumerate(text):
                if ch == "\n":
                    line += 1
                    line_start = pos + k + 1
        else:
            toks.append(_Tok(kind, text, line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("end", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, source):
        self.toks = tokenize(source)
        self.k = 0

    @property
    def tok(self):
        return self.toks[self.k]

    def advance(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ExpressionSyntaxError(message, tok.line, tok.col)

    def expect(self, text):
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def parse(self):
        if self.tok.kind == "end":
            raise self.error("empty expression")
        e = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self):
        e = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.text == "^":
            caret = self.advance()
            exponent = self.unary()
            if _has_variables(exponent):
                raise self.error("exponent of '^' must be a constant; use exp(b*log(a))", caret)
            return Pow(base, float(evaluate(exponent, np.zeros(3))))
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text in FUNCTIONS:
                if self.tok.text != "(":
                    raise self.error(f"function {tok.text!r} must be called with parentheses")
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            raise UnknownIdentifier(tok.text, tok.line, tok.col)
        if tok.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")


def parse(source):
    """Parse expression text into an AST."""
    return _Parser(source).parse()


def _has_variables(e):
    if isinstance(e, Var):
        return True
    if isinstance(e, Num):
        return False
    if isinstance(e, Neg):
        return _has_variables(e.operand)
    if isinstance(e, BinOp):
        return _has_variables(e.left) or _has_variables(e.right)
    if isinstance(e, Pow):
        return _has_variables(e.base)
    return _has_variables(e.arg)


def to_source(e):
    """Render an AST back to (fully parenthesised) expression text."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Pow):
        return f"({to_source(e.base)}^({e.exponent!r}))"
    return f"{e.func}({to_source(e.arg)})"


_NUMPY = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "abs": np.abs,
    "cbrt": np.cbrt,
}


def evaluate(e, point):
    """Plain floating-point evaluation; ``point`` has shape ``(3, *batch)``."""
    point = np.asarray(point, dtype=float)
    if isinstance(e, Num):
        return np.full(point.shape[1:], e.value)
    if isinstance(e, Var):
        return point[e.index]
    if isinstance(e, Neg):
        return -evaluate(e.operand, point)
    if isinstance(e, BinOp):
        a, b = evaluate(e.left, point), evaluate(e.right, point)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        with np.errstate(divide="ignore", invalid="ignore"):
            return a / b
    if isinstance(e, Pow):
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.power(evaluate(e.base, point), e.exponent)
    with np.errstate(invalid="ignore", divide="ignore"):
        return _NUMPY[e.func](evaluate(e.arg, point))


def eval_jet(e, point, order=DEFAULT_ORDER):
    """Evaluate ``e`` as a Taylor jet of the given order at ``point``.

    ``point`` is a 3-vector or an array of shape ``(3, *batch)``.
    """
    point = np.asarray(point, dtype=float)
    if point.shape[0] != 3:
        raise ValueError("point must have leading dimension 3")
    cache = {}

    def rec(node):
        if isinstance(node, Num):
            return Jet.constant(np.full(point.shape[1:], node.value), order, point)
        if isinstance(node, Var):
            if node.name not in cache:
                cache[node.name] = Jet.variable(node.index, point, order)
            return cache[node.name]
        if isinstance(node, Neg):
            return -rec(node.operand)
        if isinstance(node, BinOp):
            a, b = rec(node.left), rec(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return a / b
        if isinstance(node, Pow):
            return rec(node.base) ** node.exponent
        return jets.FUNCTIONS[node.func](rec(node.arg))

    try:
        return rec(e)
    except DomainError:
        raise
    except (FloatingPointError, ZeroDivisionError) as exc:
        raise DomainError(str(exc)) from exc
