"""Potential expressions q(x): parsing, evaluation and symbolic derivatives.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' uint)?
    atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
    func   := 'sin' | 'cos' | 'exp'

Powers bind tighter than unary minus, so ``-x^2`` is ``-(x^2)``.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import EvalDomainError, PotentialSyntaxError

CONST = "const"
VAR = "x"
NEG = "neg"
ADD = "add"
SUB = "sub"
MUL = "mul"
DIV = "div"
POW = "pow"
SIN = "sin"
COS = "cos"
EXP = "exp"

FUNCTIONS = (SIN, COS, EXP)
_ARITY = {CONST: 0, VAR: 0, NEG: 1, ADD: 2, SUB: 2, MUL: 2, DIV: 2, POW: 1,
          SIN: 1, COS: 1, EXP: 1}

# 257 points on [-0.05, 1.05]
PROBE_GRID = np.linspace(-0.05, 1.05, 257)


@dataclass(frozen=True)
class Expr:
    """Immutable expression tree node.

    ``value`` holds the float of a constant or the integer exponent of a power
    node; it is ``None`` for every other kind.
    """

    kind: str
    children: tuple = ()
    value: Union[float, int, None] = None

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown node kind {self.kind!r}")
        if len(self.children) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} children")
        if self.kind == POW and (not isinstance(self.value, int) or self.value < 0):
            raise ValueError("power exponent must be a non-negative integer")

    def __str__(self):
        return to_source(self)


def const(v) -> Expr:
    return Expr(CONST, (), float(v))


X = Expr(VAR)
ZERO = const(0.0)
ONE = const(1.0)


def _is_const(e, v=None):
    return e.kind == CONST and (v is None or e.value == v)


# -- constructors with literal folding ------------------------------------------

def neg(a):
    if _is_const(a):
        return const(-a.value)
    if a.kind == NEG:
        return a.children[0]
    return Expr(NEG, (a,))


def add(a, b):
    if _is_const(a) and _is_const(b):
        return const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Expr(ADD, (a, b))


def sub(a, b):
    if _is_const(a) and _is_const(b):
        return const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return Expr(SUB, (a, b))


def mul(a, b):
    if _is_const(a) and _is_const(b):
        return const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return Expr(MUL, (a, b))


def div(a, b):
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return const(a.value / b.value)
    return Expr(DIV, (a, b))


def power(a, k: int):
    if k == 0:
        return ONE
    if k == 1:
        return a
    if _is_const(a):
        try:
            return const(a.value ** k)
        except OverflowError:
            pass
    return Expr(POW, (a,), k)


def func(name, a):
    if _is_const(a):
        try:
            return const(getattr(math, name)(a.value))
        except OverflowError:
            pass
    return Expr(name, (a,))


# -- parsing --------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = []
        pos = 0
        while True:
            while pos < len(src) and src[pos].isspace():
                pos += 1
            if pos >= len(src):
                break
            m = _TOKEN.match(src, pos)
            if m is None or m.end() == pos:
                self._fail(pos, "number, 'x', function name, operator or parenthesis",
                           "unexpected character")
            kind = m.lastgroup
            text = m.group(kind)
            self.tokens.append((kind, text, m.start(kind)))
            pos = m.end()
        self.tokens.append(("eof", "", len(src)))
        self.i = 0

    def _fail(self, pos, expected, message="syntax error"):
        offset = len(self.src[:pos].encode("utf-8"))
        raise PotentialSyntaxError(message, self.src, offset, expected)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, pos = self.take()
        if kind != "op" or text != op:
            self._fail(pos, repr(op))

    def parse(self):
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "eof":
            self._fail(pos, "operator or end of input")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            e = Expr(ADD if op == "+" else SUB, (e, rhs))
        return e

    def term(self):
        e = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.factor()
            e = Expr(MUL if op == "*" else DIV, (e, rhs))
        return e

    def factor(self):
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Expr(NEG, (self.factor(),))
        base = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.take()
            kind, text, pos = self.take()
            if kind != "number" or not text.isdigit():
                self._fail(pos, "unsigned integer exponent")
            return Expr(POW, (base,), int(text))
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "number":
            return Expr(CONST, (), float(text))
        if kind == "name":
            if text == "x":
                return X
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Expr(text, (arg,))
            self._fail(pos, "'x' or one of sin, cos, exp", f"unknown name {text!r}")
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        self._fail(pos, "number, 'x', function call or '('")


def parse_expr(src: str) -> Expr:
    """Parse ``src`` into an :class:`Expr`; raises PotentialSyntaxError."""
    if not src or not src.strip():
        raise PotentialSyntaxError("empty expression", src or "", 0, "expression")
    return _Parser(src).parse()


# -- printing -------------------------------------------------------------------

_INFIX = {ADD: "+", SUB: "-", MUL: "*", DIV: "/"}


def to_source(e: Expr) -> str:
    """Fully parenthesized source text that parses back to an equivalent tree."""
    k = e.kind
    if k == CONST:
        return f"({e.value!r})" if e.value < 0 else repr(e.value)
    if k == VAR:
        return "x"
    if k == NEG:
        return f"(-{to_source(e.children[0])})"
    if k in _INFIX:
        a, b = e.children
        return f"({to_source(a)} {_INFIX[k]} {to_source(b)})"
    if k == POW:
        return f"({to_source(e.children[0])})^{e.value}"
    return f"{k}({to_source(e.children[0])})"


# -- calculus -------------------------------------------------------------------

def differentiate(e: Expr) -> Expr:
    """Exact d/dx of ``e``; only literal subtrees are folded."""
    k = e.kind
    if k == CONST:
        return ZERO
    if k == VAR:
        return ONE
    if k == NEG:
        return neg(differentiate(e.children[0]))
    if k == ADD:
        a, b = e.children
        return add(differentiate(a), differentiate(b))
    if k == SUB:
        a, b = e.children
        return sub(differentiate(a), differentiate(b))
    if k == MUL:
        a, b = e.children
        return add(mul(differentiate(a), b), mul(a, differentiate(b)))
    if k == DIV:
        a, b = e.children
        num = sub(mul(differentiate(a), b), mul(a, differentiate(b)))
        return div(num, power(b, 2))
    if k == POW:
        a = e.children[0]
        n = e.value
        if n == 0:
            return ZERO
        return mul(mul(const(n), power(a, n - 1)), differentiate(a))
    a = e.children[0]
    da = differentiate(a)
    if k == SIN:
        return mul(func(COS, a), da)
    if k == COS:
        return neg(mul(func(SIN, a), da))
    if k == EXP:
        return mul(func(EXP, a), da)
    raise AssertionError(k)


def evaluate(e: Expr, x: float) -> float:
    """Evaluate in double precision, raising EvalDomainError on poles/overflow."""
    try:
        v = _eval(e, float(x))
    except (ZeroDivisionError, OverflowError) as exc:
        raise EvalDomainError(f"{to_source(e)} at x={x!r}: {exc}") from None
    if not math.isfinite(v):
        raise EvalDomainError(f"{to_source(e)} is not finite at x={x!r}")
    return v


def _eval(e, x):
    k = e.kind
    if k == CONST:
        return e.value
    if k == VAR:
        return x
    if k == NEG:
        return -_eval(e.children[0], x)
    if k == POW:
        v = _eval(e.children[0], x) ** e.value
    elif k in _INFIX:
        a = _eval(e.children[0], x)
        b = _eval(e.children[1], x)
        if k == ADD:
            v = a + b
        elif k == SUB:
            v = a - b
        elif k == MUL:
            v = a * b
        else:
            if b == 0.0:
                raise ZeroDivisionError("division by zero")
            v = a / b
    else:
        v = getattr(math, k)(_eval(e.children[0], x))
    if not math.isfinite(v):
        raise OverflowError("non-finite intermediate")
    return v


_NP = {SIN: np.sin, COS: np.cos, EXP: np.exp}


def compile_expr(e: Expr) -> Callable:
    """Unchecked evaluator that accepts floats or numpy arrays."""
    k = e.kind
    if k == CONST:
        v = e.value
        return lambda x: v + 0.0 * x
    if k == VAR:
        return lambda x: x
    if k == NEG:
        f = compile_expr(e.children[0])
        return lambda x: -f(x)
    if k == POW:
        f = compile_expr(e.children[0])
        n = e.value
        return lambda x: f(x) ** n
    if k in _INFIX:
        f = compile_expr(e.children[0])
        g = compile_expr(e.children[1])
        if k == ADD:
            return lambda x: f(x) + g(x)
        if k == SUB:
            return lambda x: f(x) - g(x)
        if k == MUL:
            return lambda x: f(x) * g(x)
        return lambda x: f(x) / g(x)
    f = compile_expr(e.children[0])
    u = _NP[k]
    return lambda x: u(f(x))


# -- Potential ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Potential:
    """A parsed potential with lazily extended symbolic derivatives."""

    source: str
    ast: Expr
    _derivs: list = field(default_factory=list, repr=False)
    _compiled: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self._derivs.append(self.ast)
        for x in PROBE_GRID:
            evaluate(self.ast, x)

    def derivative_ast(self, m: int) -> Expr:
        if m < 0:
            raise ValueError("derivative order must be >= 0")
        with self._lock:
            while len(self._derivs) <= m:
                self._derivs.append(differentiate(self._derivs[-1]))
            return self._derivs[m]

    @property
    def derivative_asts(self) -> tuple:
        """Derivatives computed so far; entry m is the m-th derivative."""
        with self._lock:
            return tuple(self._derivs)

    def derivative(self, m: int) -> Callable:
        """Compiled m-th derivative, vectorized over numpy arrays."""
        f = self._compiled.get(m)
        if f is None:
            f = compile_expr(self.derivative_ast(m))
            self._compiled[m] = f
        return f

    def __call__(self, x):
        return self.derivative(0)(x)

    def bounds(self):
        """(min, max) of q sampled on the probe grid restricted to [0, 1]."""
        xs = PROBE_GRID[(PROBE_GRID >= 0.0) & (PROBE_GRID <= 1.0)]
        v = np.asarray(self(xs), dtype=float)
        return float(v.min()), float(v.max())


def parse_potential(src: str) -> Potential:
    """Parse ``src`` and probe it for poles near [0, 1]."""
    return Potential(src, parse_expr(src))
