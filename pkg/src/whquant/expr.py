"""Small expression language for coefficient functions.

Grammar, lowest to highest precedence::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?        # right associative
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

The exponent of ``^`` must reduce to a number literal (``q^-1`` and
``q^(2)`` are fine, ``q^q`` is not).  ``step`` is the Heaviside function
with ``step(0) = 1/2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import special

FUNCTIONS = ("exp", "erfc", "sin", "cos", "sqrt", "step")
VARIABLES = ("q", "p", "x")


class ExprError(ValueError):
    """Parse or evaluation error; ``offset`` is a byte offset into the source."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


# --------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Variable:
    name: str


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
    name: str
    args: tuple["Node", ...]


Node = Number | Variable | Neg | BinOp | Call


# ------------------------------------------------------------------- lexer

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    raw = src.encode("utf-8")
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExprError(f"unexpected character {src[bad]!r}", len(src[:bad].encode("utf-8")))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(src[:start].encode("utf-8"))))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, src: str, variables: Iterable[str]):
        self.tokens = _tokenize(src)
        self.i = 0
        self.variables = tuple(variables)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, off = self.take()
        if text != value:
            raise ExprError(f"expected {value!r}, found {text or 'end of input'!r}", off)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ExprError(f"unexpected token {text!r}", off)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            off = self.take()[2]
            exponent = _fold_number(self.unary())
            if not isinstance(exponent, Number):
                raise ExprError("exponent must be a number", off)
            return BinOp("^", base, exponent)
        return base

    def atom(self) -> Node:
        kind, text, off = self.take()
        if kind == "num":
            return Number(float(text))
        if kind == "name":
            if self.peek()[:2] == ("op", "("):
                if text not in FUNCTIONS:
                    raise ExprError(f"unknown function {text!r}", off)
                self.take()
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != 1:
                    raise ExprError(f"{text}() takes 1 argument, got {len(args)}", off)
                return Call(text, tuple(args))
            if text in FUNCTIONS:
                raise ExprError(f"function {text!r} needs an argument", off)
            if text not in self.variables:
                raise ExprError(f"unknown identifier {text!r}", off)
            return Variable(text)
        if (kind, text) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        raise ExprError(f"unexpected token {text or 'end of input'!r}", off)


def _fold_number(node: Node) -> Node:
    # negations and powers of literals collapse to a literal
    if isinstance(node, Neg):
        inner = _fold_number(node.arg)
        if isinstance(inner, Number):
            return Number(-inner.value)
    if isinstance(node, BinOp) and node.op == "^":
        a, b = _fold_number(node.left), _fold_number(node.right)
        if isinstance(a, Number) and isinstance(b, Number):
            return Number(float(a.value) ** float(b.value))
    return node


def parse_expr(src: str, var: str | Iterable[str] = "x") -> Node:
    """Parse ``src``; free variables must belong to ``var``."""
    if not src or not src.strip():
        raise ExprError("empty expression", 0)
    variables = (var,) if isinstance(var, str) else tuple(var)
    for v in variables:
        if v not in VARIABLES:
            raise ExprError(f"variable must be one of {VARIABLES}, got {v!r}")
    return _Parser(src, variables).parse()


# ----------------------------------------------------------- pretty print


def _fmt_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def to_string(node: Node) -> str:
    """Render with explicit parentheses so that parsing the output gives ``node`` back."""
    if isinstance(node, Number):
        s = _fmt_number(node.value)
        return f"({s})" if node.value < 0 or s.startswith("-") else s
    if isinstance(node, Variable):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_string(node.arg)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_string(a) for a in node.args)})"
    return f"({to_string(node.left)} {node.op} {to_string(node.right)})"


# -------------------------------------------------------------- evaluation

_CALLS = {
    "exp": np.exp,
    "erfc": special.erfc,
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": np.sqrt,
    "step": lambda u: np.heaviside(u, 0.5),
}


def evaluate(node: Node, env: dict[str, np.ndarray | float]):
    """Vectorised evaluation; ``env`` maps variable names to arrays or scalars."""
    if isinstance(node, Number):
        return np.float64(node.value)
    if isinstance(node, Variable):
        try:
            # numpy scalars give inf / nan on division by zero instead of raising
            v = env[node.name]
            return np.float64(v) if isinstance(v, (int, float)) else v
        except KeyError:
            raise ExprError(f"no value bound for variable {node.name!r}") from None
    if isinstance(node, Neg):
        return -evaluate(node.arg, env)
    if isinstance(node, Call):
        with np.errstate(invalid="ignore", over="ignore"):
            return _CALLS[node.name](evaluate(node.args[0], env))
    a = evaluate(node.left, env)
    b = evaluate(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        with np.errstate(divide="ignore", invalid="ignore"):
            return a / b
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.power(a, b) if node.right.value != int(node.right.value) else a ** int(node.right.value)


def free_variables(node: Node) -> set[str]:
    if isinstance(node, Variable):
        return {node.name}
    if isinstance(node, Number):
        return set()
    if isinstance(node, Neg):
        return free_variables(node.arg)
    if isinstance(node, Call):
        return set().union(*(free_variables(a) for a in node.args))
    return free_variables(node.left) | free_variables(node.right)


# ------------------------------------------------------------ differentiation

ZERO = Number(0.0)
ONE = Number(1.0)


def _add(a, b):
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    return BinOp("+", a, b)


def _mul(a, b):
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    return BinOp("*", a, b)


def diff(node: Node, var: str) -> Node:
    """Symbolic derivative.  ``step`` differentiates to zero (its point mass is dropped)."""
    if isinstance(node, Number):
        return ZERO
    if isinstance(node, Variable):
        return ONE if node.name == var else ZERO
    if isinstance(node, Neg):
        d = diff(node.arg, var)
        return ZERO if d == ZERO else Neg(d)
    if isinstance(node, Call):
        u = node.args[0]
        du = diff(u, var)
        if du == ZERO or node.name == "step":
            return ZERO
        outer = {
            "exp": node,
            "sin": Call("cos", (u,)),
            "cos": Neg(Call("sin", (u,))),
            "sqrt": BinOp("/", ONE, BinOp("*", Number(2.0), node)),
            "erfc": BinOp(
                "*", Number(-2.0 / math.sqrt(math.pi)), Call("exp", (Neg(BinOp("^", u, Number(2.0))),))
            ),
        }[node.name]
        return _mul(outer, du)
    a, b = node.left, node.right
    da, db = diff(a, var), diff(b, var)
    if node.op == "+":
        return _add(da, db)
    if node.op == "-":
        if db == ZERO:
            return da
        return BinOp("-", da, db)
    if node.op == "*":
        return _add(_mul(da, b), _mul(a, db))
    if node.op == "/":
        num = BinOp("-", _mul(da, b), _mul(a, db)) if db != ZERO else da
        if db == ZERO:
            return ZERO if da == ZERO else BinOp("/", da, b)
        return BinOp("/", num, BinOp("^", b, Number(2.0)))
    n = b.value
    if da == ZERO:
        return ZERO
    return _mul(_mul(Number(n), BinOp("^", a, Number(n - 1.0))), da)


# -------------------------------------------------- structural decompositions


def step_roots(node: Node, var: str, span: float = 60.0, samples: int = 24001) -> tuple[float, ...]:
    """Locations where some ``step(...)`` argument changes sign along ``var``."""
    from scipy.optimize import brentq

    args: list[Node] = []

    def walk(n):
        if isinstance(n, Call):
            if n.name == "step":
                args.append(n.args[0])
            for a in n.args:
                walk(a)
        elif isinstance(n, Neg):
            walk(n.arg)
        elif isinstance(n, BinOp):
            walk(n.left)
            walk(n.right)

    walk(node)
    roots: set[float] = set()
    xs = np.linspace(-span, span, samples)
    for arg in args:
        f = lambda t, a=arg: float(np.real(evaluate(a, {var: t})))  # noqa: E731
        vals = np.real(np.broadcast_to(evaluate(arg, {var: xs}), xs.shape))
        zero_hits = xs[vals == 0.0]
        roots.update(float(z) for z in zero_hits)
        s = np.sign(vals)
        for k in np.nonzero(s[:-1] * s[1:] < 0)[0]:
            roots.add(float(brentq(f, xs[k], xs[k + 1], xtol=1e-15, rtol=1e-15)))
    return tuple(sorted(roots))


def split_powers(node: Node, var: str, max_degree: int = 8) -> dict[int, Node]:
    """Write ``node`` as ``sum_n C_n * var**n`` with ``C_n`` free of ``var``.

    Raises ExprError when ``node`` is not polynomial in ``var``.
    """

    def merge(x: dict, y: dict, sign: float = 1.0) -> dict:
        out = dict(x)
        for k, v in y.items():
            v = v if sign > 0 else Neg(v)
            out[k] = BinOp("+", out[k], v) if k in out else v
        return out

    def mul(x: dict, y: dict) -> dict:
        out: dict[int, Node] = {}
        for i, a in x.items():
            for j, b in y.items():
                if i + j > max_degree:
                    raise ExprError(f"degree in {var} exceeds {max_degree}")
                term = BinOp("*", a, b)
                out[i + j] = BinOp("+", out[i + j], term) if i + j in out else term
        return out

    def go(n: Node) -> dict[int, Node]:
        if var not in free_variables(n):
            return {0: n}
        if isinstance(n, Variable):
            return {1: ONE}
        if isinstance(n, Neg):
            return {k: Neg(v) for k, v in go(n.arg).items()}
        if isinstance(n, Call):
            raise ExprError(f"{n.name}() of {var} is not polynomial in {var}")
        if n.op == "+":
            return merge(go(n.left), go(n.right))
        if n.op == "-":
            return merge(go(n.left), go(n.right), -1.0)
        if n.op == "*":
            return mul(go(n.left), go(n.right))
        if n.op == "/":
            if var in free_variables(n.right):
                raise ExprError(f"division by an expression in {var}")
            return {k: BinOp("/", v, n.right) for k, v in go(n.left).items()}
        k = n.right.value
        if k != int(k) or k < 0:
            raise ExprError(f"non-integer or negative power of {var}")
        out = {0: ONE}
        base = go(n.left)
        for _ in range(int(k)):
            out = mul(out, base)
        return out

    return go(node)


def polynomial_coefficients(node: Node, var: str, max_degree: int = 8) -> np.ndarray | None:
    """Ascending numeric coefficients if ``node`` is a polynomial in ``var`` alone."""
    if free_variables(node) - {var}:
        return None
    try:
        parts = split_powers(node, var, max_degree)
    except ExprError:
        return None
    deg = max(parts)
    coeffs = np.zeros(deg + 1)
    for k, c in parts.items():
        coeffs[k] = float(evaluate(c, {}))
    return coeffs
