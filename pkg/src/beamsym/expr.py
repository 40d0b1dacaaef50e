"""Closed-form expressions in one variable ``x``.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | factor
    factor := base ("^" unary)?
    base   := NUMBER | "x" | IDENT "(" expr ")" | "(" expr ")"

with IDENT one of exp, ln, sqrt, sin, cos.  Error offsets are 1-based
columns; an error at end of input points one past the last character.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import jet as J
from .jet import DomainError, Jet

FUNCTIONS = ("exp", "ln", "sqrt", "sin", "cos")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


# AST ---------------------------------------------------------------------


class Node:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Num(Node):
    value: float


@dataclass(frozen=True, slots=True)
class Var(Node):
    pass


@dataclass(frozen=True, slots=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True, slots=True)
class Call(Node):
    fn: str
    arg: Node


@dataclass(frozen=True, slots=True)
class BinOp(Node):
    left: Node
    right: Node


class Add(BinOp):
    __slots__ = ()
    symbol = "+"


class Sub(BinOp):
    __slots__ = ()
    symbol = "-"


class Mul(BinOp):
    __slots__ = ()
    symbol = "*"


class Div(BinOp):
    __slots__ = ()
    symbol = "/"


class Pow(BinOp):
    __slots__ = ()
    symbol = "^"


_BINOPS = {"+": Add, "-": Sub, "*": Mul, "/": Div, "^": Pow}

X = Var()


def num(v: float) -> Node:
    """Literal for ``v``; negative values become ``Neg(Num(-v))`` so they unparse cleanly."""
    v = float(v)
    return Neg(Num(-v)) if v < 0 else Num(v)


# Lexer / parser ----------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str):
    pos = 0
    tokens = []
    n = len(src)
    while True:
        while pos < n and src[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", pos + 1, src)
        kind = m.lastgroup
        text = m.group(kind)
        start = m.start(kind)
        tokens.append((kind, text, start + 1))
        pos = m.end()
    tokens.append(("end", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2], self.src)

    def expect(self, text):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == text:
            return self.take()
        what = "end of input" if tok[0] == "end" else repr(tok[1])
        self.error(f"expected {text!r}, found {what}")

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[1] == ")":
                self.error("unbalanced ')'")
            self.error(f"unexpected {tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = _BINOPS[op](node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = _BINOPS[op](node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.factor()

    def factor(self):
        base = self.base()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            return Pow(base, self.unary())
        return base

    def base(self):
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "x":
                return X
            if text not in FUNCTIONS:
                self.error(f"unknown identifier {text!r}", tok)
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(text, arg)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            self.error("unexpected end of input", tok)
        if text == ")":
            self.error("unbalanced ')'", tok)
        self.error(f"unexpected {text!r}", tok)


def parse_expr(src: str) -> Node:
    return _Parser(src).parse()


# Unparse -------------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}
_ATOM = 5


def _prec(node):
    return _PREC.get(type(node), _ATOM)


def _fmt_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def unparse(node: Node) -> str:
    def wrap(child, minimum):
        s = unparse(child)
        return f"({s})" if _prec(child) < minimum else s

    if isinstance(node, Num):
        s = _fmt_number(node.value)
        return f"({s})" if node.value < 0 else s
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Call):
        return f"{node.fn}({unparse(node.arg)})"
    if isinstance(node, Neg):
        return "-" + wrap(node.arg, 3)
    if isinstance(node, Pow):
        return f"{wrap(node.left, _ATOM)}^{wrap(node.right, 3)}"
    if isinstance(node, (Add, Sub)):
        return f"{wrap(node.left, 1)} {node.symbol} {wrap(node.right, 2)}"
    if isinstance(node, (Mul, Div)):
        return f"{wrap(node.left, 2)}{node.symbol}{wrap(node.right, 3)}"
    raise TypeError(f"not an expression node: {node!r}")


# Evaluation ----------------------------------------------------------------


def is_constant(node: Node) -> bool:
    if isinstance(node, Var):
        return False
    if isinstance(node, Num):
        return True
    if isinstance(node, (Neg, Call)):
        return is_constant(node.arg)
    return is_constant(node.left) and is_constant(node.right)


_NP_FUNCS = {"exp": np.exp, "ln": np.log, "sqrt": np.sqrt, "sin": np.sin, "cos": np.cos}


def evaluate(node: Node, x):
    """Plain numeric evaluation; ``x`` may be a float or an ndarray."""
    with np.errstate(all="ignore"):
        return _eval(node, np.asarray(x, dtype=float))


def _eval(node, x):
    if isinstance(node, Num):
        return np.full_like(x, node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.arg, x)
    if isinstance(node, Call):
        return _NP_FUNCS[node.fn](_eval(node.arg, x))
    a = _eval(node.left, x)
    b = _eval(node.right, x)
    if isinstance(node, Add):
        return a + b
    if isinstance(node, Sub):
        return a - b
    if isinstance(node, Mul):
        return a * b
    if isinstance(node, Div):
        return a / b
    return np.power(a, b)


_JET_FUNCS = {"exp": J.exp, "ln": J.log, "sqrt": J.sqrt, "sin": J.sin, "cos": J.cos}


def eval_jet(node: Node, x0: float) -> Jet:
    """Order-6 jet of the expression at ``x0``."""
    try:
        return _jet(node, Jet.variable(float(x0)))
    except DomainError as exc:
        raise exc.at(float(x0)) from None


def compose_jet(node: Node, inner: Jet) -> Jet:
    """Jet of ``expr(h)`` where ``inner`` is the jet of h."""
    return _jet(node, inner)


def _jet(node, x):
    if isinstance(node, Num):
        return Jet.constant(node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_jet(node.arg, x)
    if isinstance(node, Call):
        return _JET_FUNCS[node.fn](_jet(node.arg, x))
    a = _jet(node.left, x)
    if isinstance(node, Pow) and is_constant(node.right):
        r = float(_eval(node.right, np.asarray(0.0)))
        if not math.isfinite(r):
            raise DomainError("non-finite exponent")
        return J.power(a, r)
    b = _jet(node.right, x)
    if isinstance(node, Add):
        return a + b
    if isinstance(node, Sub):
        return a - b
    if isinstance(node, Mul):
        return a * b
    if isinstance(node, Div):
        return a / b
    return J.exp(b * J.log(a))
