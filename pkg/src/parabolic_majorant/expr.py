"""
Scalar expressions in the variables ``x, y, z, t``.

Coefficients, data and manufactured solutions are stored as text and parsed
into a small immutable tree. Evaluation is vectorised over arrays of points.

Grammar (standard precedence, ``^`` binds tighter than unary minus and is
right-associative)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Example
-------
>>> e = parse_expr("sin(pi*x)")
>>> float(eval_expr(e, [0.5], 0.0))
1.0
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

VARIABLES = ("x", "y", "z", "t")
CONSTANTS = {"pi": math.pi}
FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "sqrt": 1,
    "abs": 1,
    "atan2": 2,
}


class ExprSyntaxError(ValueError):
    """Malformed expression text; ``offset`` is the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ExprDomainError(ArithmeticError):
    """Evaluation left the domain of an operation (division by zero, sqrt(<0))."""


# --- tree -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Node", ...]


Node = Union[Num, Var, Const, Neg, BinOp, Call]


# --- lexer / parser -----------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokenize(src):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            off = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {src[off]!r}", off)
        kind = m.lastgroup
        text = m.group(kind)
        start = m.start(kind)
        if text == "**":
            text = "^"
        tokens.append((kind, text, start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, off = self.take()
        if val != text:
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {text!r}, found {found}", off)

    def parse(self):
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Neg(self.unary())
        if self.peek()[1] == "+" and self.peek()[0] == "op":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if self.peek()[1] == "(":
                if val not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {val!r}", off)
                self.take()
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[val]:
                    raise ExprSyntaxError(
                        f"{val} takes {FUNCTIONS[val]} argument(s), got {len(args)}", off
                    )
                return Call(val, tuple(args))
            if val in VARIABLES:
                return Var(val)
            if val in CONSTANTS:
                return Const(val)
            if val in FUNCTIONS:
                raise ExprSyntaxError(f"function {val!r} needs arguments", off)
            raise ExprSyntaxError(f"unknown identifier {val!r}", off)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {found}", off)


# --- printing -----------------------------------------------------------------


def to_text(node: Node) -> str:
    """Canonical, fully parenthesised text form; ``parse_expr`` inverts it."""
    if isinstance(node, Num):
        if node.value < 0:
            return f"(-{repr(-node.value)})"
        return repr(float(node.value))
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)}{node.op}{to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({','.join(to_text(a) for a in node.args)})"
    raise TypeError(node)


# --- evaluation ---------------------------------------------------------------


def _checked_div(a, b):
    if np.any(b == 0):
        raise ExprDomainError("division by zero")
    return a / b


def _checked_sqrt(a):
    if np.any(a < 0):
        raise ExprDomainError("sqrt of a negative number")
    return np.sqrt(a)


def _checked_pow(a, b):
    with np.errstate(all="ignore"):
        out = np.power(a, b)
    bad = ~np.isfinite(out) & np.isfinite(a) & np.isfinite(b)
    if np.any(bad):
        if np.any((np.asarray(a) == 0) & (np.asarray(b) < 0) & bad):
            raise ExprDomainError("division by zero (0 raised to a negative power)")
        raise ExprDomainError("power of a negative base with non-integer exponent")
    return out


_BINARY = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": _checked_div,
    "^": _checked_pow,
}
_UNARY = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": _checked_sqrt,
    "abs": np.abs,
}


def _compile(node):
    """Turn the tree into nested closures ``f(coords, t)``."""
    if isinstance(node, Num):
        v = node.value
        return lambda c, t: v
    if isinstance(node, Const):
        v = CONSTANTS[node.name]
        return lambda c, t: v
    if isinstance(node, Var):
        if node.name == "t":
            return lambda c, t: t
        k = VARIABLES.index(node.name)
        return lambda c, t: c[k]
    if isinstance(node, Neg):
        f = _compile(node.operand)
        return lambda c, t: -f(c, t)
    if isinstance(node, BinOp):
        fa, fb, op = _compile(node.left), _compile(node.right), _BINARY[node.op]
        return lambda c, t: op(fa(c, t), fb(c, t))
    if isinstance(node, Call):
        if node.name == "atan2":
            fa, fb = (_compile(a) for a in node.args)
            return lambda c, t: np.arctan2(fa(c, t), fb(c, t))
        f, op = _compile(node.args[0]), _UNARY[node.name]
        return lambda c, t: op(f(c, t))
    raise TypeError(node)


def _variables(node, acc):
    if isinstance(node, Var):
        acc.add(node.name)
    elif isinstance(node, Neg):
        _variables(node.operand, acc)
    elif isinstance(node, BinOp):
        _variables(node.left, acc)
        _variables(node.right, acc)
    elif isinstance(node, Call):
        for a in node.args:
            _variables(a, acc)
    return acc


class ExprFn:
    """Parsed expression; immutable and callable as ``f(points, t)``.

    ``points`` has shape ``(..., d)`` with ``d <= 3``; coordinates beyond ``d``
    read as zero. The result broadcasts to ``points.shape[:-1]``.
    """

    __slots__ = ("ast", "source", "_fn", "_vars")

    def __init__(self, ast: Node, source: str | None = None):
        object.__setattr__(self, "ast", ast)
        object.__setattr__(self, "source", source if source is not None else to_text(ast))
        object.__setattr__(self, "_fn", _compile(ast))
        object.__setattr__(self, "_vars", frozenset(_variables(ast, set())))

    def __setattr__(self, name, value):
        raise AttributeError("ExprFn is immutable")

    def __reduce__(self):
        return (parse_expr, (self.source,))

    def __repr__(self):
        return f"ExprFn({self.source!r})"

    @property
    def variables(self):
        return self._vars

    @property
    def is_constant(self):
        return not self._vars

    def __call__(self, points, t=0.0):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 0:
            pts = pts.reshape(1)
        d = pts.shape[-1]
        if d > 3:
            raise ValueError("points may have at most 3 coordinates")
        shape = pts.shape[:-1]
        zero = np.zeros(shape)
        coords = [pts[..., k] if k < d else zero for k in range(3)]
        tt = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = self._fn(coords, tt)
        out = np.broadcast_to(np.asarray(out, dtype=float), np.broadcast_shapes(shape, tt.shape))
        return out if out.ndim else float(out)


def parse_expr(src: str) -> ExprFn:
    """Parse ``src`` into an :class:`ExprFn`.

    Raises
    ------
    ExprSyntaxError
        On malformed input, unknown identifiers or wrong function arity.
    """
    if not isinstance(src, str):
        raise TypeError("expression source must be a string")
    return ExprFn(_Parser(src).parse(), src)


def eval_expr(e: ExprFn, x, t=0.0):
    """Evaluate ``e`` at point(s) ``x`` and time ``t``."""
    return e(x, t)


def as_expr(value) -> ExprFn:
    """Coerce a string, number or ExprFn into an ExprFn."""
    if isinstance(value, ExprFn):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return ExprFn(Num(float(value)) if value >= 0 else Neg(Num(-float(value))))
    return parse_expr(str(value))


Evaluator = Callable[[np.ndarray, float], np.ndarray]
