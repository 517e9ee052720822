"""Arithmetic expression trees over named variables.

The grammar (documented in the README) covers constants, variables, the four
arithmetic operators, ``^`` for powers, unary minus, and the functions
``sin``, ``cos``, ``exp`` and ``pow``.  Substitution is literal — no
simplification ever happens — so composing systems symbolically and then
evaluating is an arithmetic-level identity with evaluating the parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivisionByZero, ParseError, UnboundVariable


class Expr:
    """Base class for expression nodes; all nodes are immutable."""

    def eval(self, env: dict[str, float]) -> float:
        raise NotImplementedError

    def substitute(self, mapping: dict[str, "Expr"]) -> "Expr":
        raise NotImplementedError

    def free_vars(self) -> set[str]:
        raise NotImplementedError

    def __str__(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def eval(self, env):
        return self.value

    def substitute(self, mapping):
        return self

    def free_vars(self):
        return set()

    def __str__(self):
        if self.value == int(self.value) and abs(self.value) < 1e16:
            return str(int(self.value))
        return repr(self.value)


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def eval(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise UnboundVariable(f"variable {self.name!r} is not bound") from None

    def substitute(self, mapping):
        return mapping.get(self.name, self)

    def free_vars(self):
        return {self.name}

    def __str__(self):
        return self.name


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    lhs: Expr
    rhs: Expr

    def eval(self, env):
        a = self.lhs.eval(env)
        b = self.rhs.eval(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            if b == 0:
                raise DivisionByZero(f"division by zero in {self}")
            return a / b
        if self.op == "^":
            return a**b
        raise ValueError(f"unknown operator {self.op!r}")

    def substitute(self, mapping):
        return BinOp(self.op, self.lhs.substitute(mapping), self.rhs.substitute(mapping))

    def free_vars(self):
        return self.lhs.free_vars() | self.rhs.free_vars()

    def __str__(self):
        prec = _PRECEDENCE[self.op]
        lhs = str(self.lhs)
        rhs = str(self.rhs)
        if isinstance(self.lhs, BinOp) and _PRECEDENCE[self.lhs.op] < prec:
            lhs = f"({lhs})"
        if isinstance(self.rhs, BinOp) and _PRECEDENCE[self.rhs.op] <= prec:
            rhs = f"({rhs})"
        if isinstance(self.rhs, Neg):
            rhs = f"({rhs})"
        return f"{lhs} {self.op} {rhs}"


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def eval(self, env):
        return -self.arg.eval(env)

    def substitute(self, mapping):
        return Neg(self.arg.substitute(mapping))

    def free_vars(self):
        return self.arg.free_vars()

    def __str__(self):
        if isinstance(self.arg, (Const, Var, Call)):
            return f"-{self.arg}"
        return f"-({self.arg})"


_FUNCTIONS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr

    def eval(self, env):
        return _FUNCTIONS[self.fn](self.arg.eval(env))

    def substitute(self, mapping):
        return Call(self.fn, self.arg.substitute(mapping))

    def free_vars(self):
        return self.arg.free_vars()

    def __str__(self):
        return f"{self.fn}({self.arg})"


class _Tokenizer:
    def __init__(self, text: str, filename: str | None = None):
        self.text = text
        self.filename = filename
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col, self.filename)

    def tokens(self):
        out = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\r\n":
                self._advance()
                continue
            start = (self.line, self.col)
            if ch.isdigit() or (ch == "." and self._peek_digit()):
                out.append(("num", self._number(), start))
            elif ch.isalpha() or ch == "_":
                out.append(("name", self._name(), start))
            elif ch in "+-*/^(),":
                out.append((ch, ch, start))
                self._advance()
            else:
                raise self.error(f"unexpected character {ch!r}")
        out.append(("end", "", (self.line, self.col)))
        return out

    def _peek_digit(self):
        return self.pos + 1 < len(self.text) and self.text[self.pos + 1].isdigit()

    def _advance(self):
        if self.text[self.pos] == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        self.pos += 1

    def _number(self) -> float:
        start = self.pos
        seen_dot = False
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isdigit():
                self._advance()
            elif ch == "." and not seen_dot:
                seen_dot = True
                self._advance()
            elif ch in "eE" and self.pos + 1 < len(self.text) and (
                self.text[self.pos + 1].isdigit() or self.text[self.pos + 1] in "+-"
            ):
                self._advance()
                if self.text[self.pos] in "+-":
                    self._advance()
            else:
                break
        return float(self.text[start : self.pos])

    def _name(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self._advance()
        return self.text[start : self.pos]


class _Parser:
    """Recursive descent over the token list; ``^`` is right associative."""

    def __init__(self, tokens, filename=None):
        self.tokens = tokens
        self.i = 0
        self.filename = filename

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            line, col = tok[2]
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", line, col, self.filename)
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            line, col = tok[2]
            raise ParseError(f"unexpected trailing input {tok[1]!r}", line, col, self.filename)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            e = BinOp(op, e, self.factor())
        return e

    def factor(self) -> Expr:
        if self.peek()[0] == "-":
            self.next()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "^":
            self.next()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Expr:
        tok = self.next()
        kind, value, (line, col) = tok
        if kind == "num":
            return Const(value)
        if kind == "name":
            if self.peek()[0] == "(":
                self.next()
                first = self.expr()
                if value == "pow":
                    self.expect(",")
                    second = self.expr()
                    self.expect(")")
                    return BinOp("^", first, second)
                self.expect(")")
                if value not in _FUNCTIONS:
                    raise ParseError(f"unknown function {value!r}", line, col, self.filename)
                return Call(value, first)
            return Var(value)
        if kind == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected token {value!r}", line, col, self.filename)


def parse(text: str, filename: str | None = None) -> Expr:
    tokens = _Tokenizer(text, filename).tokens()
    return _Parser(tokens, filename).parse()


def evaluate(expr: Expr, env: dict[str, float]) -> float:
    return expr.eval(env)
