"""Arithmetic expressions for payoff and transition formulas.

Grammar (highest precedence first)::

    atom   := NUMBER | IDENT | 'exp' '(' expr ')' | 'log' '(' expr ')' | '(' expr ')'
    power  := atom ['^' unary]          # right-associative
    unary  := '-' unary | power
    term   := unary (('*' | '/') unary)*
    expr   := term (('+' | '-') term)*

Identifiers must belong to the variable set declared at parse time; there is
no implicit multiplication, so ``xy`` is always a single identifier.  Trees
are immutable and evaluation is a pure structural recursion, safe to run
concurrently on shared expressions.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .errors import EvalDomainError, ExprSyntaxError, UnknownVariableError

__all__ = [
    "Expr", "Num", "Var", "Neg", "Call", "BinOp",
    "parse", "evaluate", "to_string", "variables",
]

_RESERVED = ("exp", "log")


@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("expression constants must be finite")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Call:
    func: str  # 'exp' or 'log'
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Neg, Call, BinOp]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}",
                                  len(text) - len(stripped))
        tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names: frozenset[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.names = names
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", off)
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {val!r}", off)
        return e

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = BinOp(val, node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = BinOp(val, node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            # exponent may carry a sign and further '^' (right-associative)
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, off = self.advance()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if val in _RESERVED:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            if val not in self.names:
                raise UnknownVariableError(val, off)
            return Var(val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", off)
        raise ExprSyntaxError(f"unexpected {val!r}", off)


def parse(text: str, names: Iterable[str]) -> Expr:
    """Parse ``text`` over the declared variable set ``names``.

    Raises :class:`ExprSyntaxError` with the byte offset of the first bad
    token, or :class:`UnknownVariableError` for undeclared identifiers.
    """
    nameset = frozenset(names)
    bad = nameset.intersection(_RESERVED)
    if bad:
        raise ValueError(f"variable names {sorted(bad)} are reserved")
    return _Parser(text, nameset).parse()


def variables(e: Expr) -> frozenset[str]:
    """Set of variable names appearing in the tree."""
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, (Neg, Call)):
        return variables(e.arg)
    return variables(e.left) | variables(e.right)


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """IEEE double evaluation by structural recursion.

    Deterministic: equal bindings give bit-identical results.  Raises
    :class:`EvalDomainError` when the computation leaves the real domain.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return float(bindings[e.name])
        except KeyError:
            raise UnknownVariableError(e.name) from None
    if isinstance(e, Neg):
        return -evaluate(e.arg, bindings)
    if isinstance(e, Call):
        x = evaluate(e.arg, bindings)
        if e.func == "log":
            if x <= 0.0:
                raise EvalDomainError(f"log of nonpositive value {x!r}")
            return math.log(x)
        try:
            return math.exp(x)
        except OverflowError:
            raise EvalDomainError(f"exp overflow at {x!r}") from None
    a = evaluate(e.left, bindings)
    b = evaluate(e.right, bindings)
    op = e.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0.0:
            raise EvalDomainError("division by zero")
        return a / b
    # power: integer exponents allow any base, fractional ones require a
    # nonnegative base; 0^negative is rejected (math.pow semantics)
    try:
        return math.pow(a, b)
    except (ValueError, OverflowError) as exc:
        raise EvalDomainError(f"invalid power {a!r} ^ {b!r}: {exc}") from None


_LEVEL_ADD, _LEVEL_MUL, _LEVEL_NEG, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(e: Expr) -> int:
    if isinstance(e, BinOp):
        if e.op in "+-":
            return _LEVEL_ADD
        if e.op in "*/":
            return _LEVEL_MUL
        return _LEVEL_POW
    if isinstance(e, Neg):
        return _LEVEL_NEG
    return _LEVEL_ATOM


def _wrap(s: str, need: bool) -> str:
    return f"({s})" if need else s


def to_string(e: Expr) -> str:
    """Render with minimal parentheses; reparsing yields an identical tree."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        inner = to_string(e.arg)
        return "-" + _wrap(inner, _level(e.arg) < _LEVEL_NEG)
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    lv = _level(e)
    ls, rs = to_string(e.left), to_string(e.right)
    if e.op == "^":
        # left operand must bind tighter than '^'; right side is parsed as a
        # unary expression, so only +/- and */ chains there need parentheses
        return _wrap(ls, _level(e.left) <= _LEVEL_POW) + "^" + \
            _wrap(rs, _level(e.right) < _LEVEL_NEG)
    left_need = _level(e.left) < lv
    right_need = _level(e.right) <= lv  # left-associative
    return f"{_wrap(ls, left_need)} {e.op} {_wrap(rs, right_need)}"
