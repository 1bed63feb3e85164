"""Recursive-descent parser for the polynomial expression grammar.

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' natural)?
    atom   := rational | 'i' | identifier | '(' expr ')'

The parser is algebra-agnostic: identifiers are resolved by a callback and the
resulting values only need ``+``, ``-``, ``*`` and ``** int``.  Operands are
multiplied left to right, so noncommutative algebras get the written order.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable

from .scalars import GaussianRational

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class ParseError(ValueError):
    """Malformed expression; ``offset`` is the 0-based character position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("id", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, resolve, scalar):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.resolve = resolve
        self.scalar = scalar

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self):
        value = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return value

    def expr(self):
        negate = False
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            negate = True
        value = self.term()
        if negate:
            value = -value
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if val == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                value = value * self.factor()
            else:
                return value

    def factor(self):
        value = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                raise ParseError("expected natural exponent", pos)
            value = value ** int(val)
        return value

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            num = int(val)
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                k3, v3, p3 = self.take()
                if k3 != "num":
                    raise ParseError("expected natural denominator", p3)
                if int(v3) == 0:
                    raise ParseError("zero denominator", p3)
                return self.scalar(GaussianRational(Fraction(num, int(v3))))
            return self.scalar(GaussianRational(num))
        if kind == "id":
            if val == "i":
                return self.scalar(GaussianRational(0, 1))
            value = self.resolve(val)
            if value is None:
                raise UnknownIdentifierError(f"unknown identifier {val!r}", pos)
            return value
        if kind == "op" and val == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_expression(text: str, resolve: Callable[[str], object], scalar: Callable[[GaussianRational], object]):
    """Parse ``text``; ``resolve`` maps identifiers to values (None = unknown)."""
    return _Parser(text, resolve, scalar).parse()
