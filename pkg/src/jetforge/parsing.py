"""Tokenizer and recursive-descent parser for the jetforge text grammar.

The parser only builds a small AST; evaluation is left to the callers
(scalar literals, series literals, CLI expressions) so each can decide
which names and functions are legal.

Rationals are lexed as single tokens, so ``1/2i`` reads as ``(1/2)*i``
and ``3/4+1/2i`` is the Gaussian rational with coordinates (3/4, 1/2).
A number or closing parenthesis directly followed by a name or an
opening parenthesis is an implicit product.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import ParseError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<dsuffix>d/d[A-Za-z]\w*)
  | (?P<rational>\d+(?:\s*/\s*\d+)?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int
    value: object = None


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text.startswith("**", pos):
            tokens.append(Token("op", "^", pos))
            pos += 2
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tok = m.group(kind)
        if kind == "rational":
            # an exponent is a bare integer: "x^2/3" is (x^2)/3
            if "/" in tok and tokens and tokens[-1].text == "^":
                m = re.compile(r"\d+").match(text, pos)
                tok = m.group()
            num, _, den = tok.partition("/")
            num = int(num)
            if den:
                den = int(den)
                if den == 0:
                    raise ParseError("zero denominator", pos)
                tokens.append(Token("number", tok, pos, mpq(num, den)))
            else:
                tokens.append(Token("number", tok, pos, mpq(num)))
        elif kind == "name":
            tokens.append(Token("name", tok, pos))
        elif kind == "op":
            tokens.append(Token("op", tok, pos))
        elif kind == "dsuffix":
            tokens.append(Token("dsuffix", tok, pos))
        pos = m.end() if kind != "rational" else pos + len(tok)
    tokens.append(Token("end", "", len(text)))
    return tokens


# AST nodes -----------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: mpq
    pos: int


@dataclass(frozen=True)
class Name:
    name: str
    pos: int


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    pos: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: int


@dataclass(frozen=True)
class Neg:
    operand: object
    pos: int


@dataclass(frozen=True)
class Tuple:
    items: tuple
    pos: int


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.tok
        if t.kind != "op" or t.text != text:
            found = t.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", t.pos)
        return self.take()

    def at_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def skip_suffix(self):
        while self.tok.kind == "dsuffix":
            self.take()

    def parse(self):
        node = self.expr()
        self.skip_suffix()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.take()
            node = BinOp(op.text, node, self.term(), op.pos)
        return node

    def term(self):
        node = self.unary()
        while True:
            if self.at_op("*") and self.tokens[self.i + 1].kind == "dsuffix":
                self.take()
            elif self.at_op("*", "/"):
                op = self.take()
                node = BinOp(op.text, node, self.unary(), op.pos)
            elif self.tok.kind in ("name", "number") or self.at_op("("):
                node = BinOp("*", node, self.power(), self.tok.pos)
            elif self.tok.kind == "dsuffix":
                self.take()
            else:
                return node

    def unary(self):
        if self.at_op("-"):
            op = self.take()
            return Neg(self.unary(), op.pos)
        if self.at_op("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.at_op("^"):
            op = self.take()
            return BinOp("^", base, self.unary(), op.pos)
        return base

    def primary(self):
        t = self.tok
        if t.kind == "number":
            self.take()
            return Num(t.value, t.pos)
        if t.kind == "name":
            self.take()
            if self.at_op("("):
                self.take()
                args = []
                if not self.at_op(")"):
                    args.append(self.expr())
                    while self.at_op(","):
                        self.take()
                        args.append(self.expr())
                self.expect(")")
                return Call(t.text, tuple(args), t.pos)
            return Name(t.text, t.pos)
        if self.at_op("("):
            self.take()
            items = [self.expr()]
            self.skip_suffix()
            while self.at_op(","):
                self.take()
                items.append(self.expr())
                self.skip_suffix()
            self.expect(")")
            if len(items) == 1:
                return items[0]
            return Tuple(tuple(items), t.pos)
        found = t.text or "end of input"
        raise ParseError(f"unexpected {found!r}", t.pos)


def parse(text: str):
    """Parse ``text`` into an AST; raises ParseError with a character position."""
    return _Parser(text).parse()


def names_in(node) -> set[str]:
    """All bare identifiers used in an AST (function names excluded)."""
    out = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Name):
            out.add(n.name)
        elif isinstance(n, Call):
            stack.extend(n.args)
        elif isinstance(n, BinOp):
            stack.extend((n.left, n.right))
        elif isinstance(n, Neg):
            stack.append(n.operand)
        elif isinstance(n, Tuple):
            stack.extend(n.items)
    return out
