"""
Lexer and recursive-descent parser for the angular expression language.

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' integer)?
    atom   := 'zeta' | 'W' | 'i' | number
            | 'h' '(' integer '/' integer ')'
            | ('exp' | 'log' | 'inv' | 'conj') '(' expr ')'
            | '(' expr ')'

Division desugars to Mul(l, Inv(r)); unary minus folds into constants.
Errors carry the byte offset of the offending token in the UTF-8 source.
"""

import math
import re
from dataclasses import dataclass
from typing import Callable

from src.core.exceptions import InvalidIndexError, ParseError
from src.expr.nodes import (
    IMAG_UNIT,
    W_MAP,
    ZETA,
    Add,
    Conj,
    Const,
    Exp,
    Expr,
    IntPow,
    Inv,
    Log,
    Mul,
    hkm,
    negate,
)

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]+)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_FUNCTIONS: dict[str, Callable[[Expr], Expr]] = {
    "exp": Exp,
    "log": Log,
    "inv": Inv,
    "conj": Conj,
}

ATOM_START = frozenset({"zeta", "W", "i", "h(", "number", "exp(", "log(", "inv(", "conj(", "(", "-"})

END = "end of input"


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "number", "name", "op" or "end"
    text: str
    offset: int  # byte offset in the UTF-8 source


def tokenize(src: str) -> list[Token]:
    """Split ``src`` into tokens, ending with an ``end`` token.

    Raises:
        ParseError: a character no token can start with
    """
    tokens: list[Token] = []
    pos = 0
    while pos < len(src):
        match = _TOKEN.match(src, pos)
        if match is None:
            raise ParseError(
                f"unexpected character {src[pos]!r}",
                offset=_byte_offset(src, pos),
                expected=ATOM_START | {"+", "*", "/", "^", ")"},
            )
        kind = match.lastgroup or "space"
        if kind != "space":
            tokens.append(Token(kind, match.group(), _byte_offset(src, pos)))
        pos = match.end()
    tokens.append(Token("end", "", _byte_offset(src, len(src))))
    return tokens


def _byte_offset(src: str, index: int) -> int:
    return len(src[:index].encode("utf-8"))


class _Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        if token.kind != "end":
            self.index += 1
        return token

    def at_op(self, *ops: str) -> bool:
        return self.current.kind == "op" and self.current.text in ops

    def error(self, expected: set[str] | frozenset[str]) -> ParseError:
        token = self.current
        found = END if token.kind == "end" else repr(token.text)
        return ParseError(f"unexpected {found}", offset=token.offset, expected=expected)

    def expect_op(self, op: str) -> Token:
        if not self.at_op(op):
            raise self.error({op})
        return self.advance()

    def integer(self, allow_sign: bool = False) -> int:
        sign = 1
        if allow_sign and self.at_op("-"):
            self.advance()
            sign = -1
        token = self.current
        if token.kind != "number" or not token.text.isdigit():
            raise self.error({"integer", "-"} if allow_sign else {"integer"})
        try:
            value = int(token.text)
        except ValueError:
            # int() refuses digit strings past sys.get_int_max_str_digits()
            raise ParseError(
                f"integer literal of {len(token.text)} digits is too long",
                offset=token.offset,
                expected={"integer"},
            ) from None
        self.advance()
        return sign * value

    # --- grammar rules ---

    def expr(self) -> Expr:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            right = self.term()
            node = Add(node, right if op == "+" else negate(right))
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.at_op("*", "/"):
            op = self.advance().text
            right = self.factor()
            node = Mul(node, right if op == "*" else Inv(right))
        return node

    def factor(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return negate(self.factor())
        node = self.atom()
        if self.at_op("^"):
            self.advance()
            node = IntPow(node, self.integer(allow_sign=True))
        return node

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.advance()
            value = float(token.text)
            if not math.isfinite(value):
                raise ParseError(
                    "number overflows a float",
                    offset=token.offset,
                    expected={"number"},
                )
            return Const(value)
        if self.at_op("("):
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        if token.kind != "name":
            raise self.error(ATOM_START)

        name = token.text
        if name == "zeta":
            self.advance()
            return ZETA
        if name == "W":
            self.advance()
            return W_MAP
        if name == "i":
            self.advance()
            return IMAG_UNIT
        if name == "h":
            return self.family_member()
        if name in _FUNCTIONS:
            self.advance()
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return _FUNCTIONS[name](arg)
        raise self.error(ATOM_START)

    def family_member(self) -> Expr:
        start = self.advance()
        self.expect_op("(")
        k = self.integer(allow_sign=True)
        self.expect_op("/")
        m = self.integer()
        self.expect_op(")")
        try:
            return hkm(k, m)
        except InvalidIndexError as exc:
            raise InvalidIndexError(exc.message, k=k, m=m, offset=start.offset) from exc


def parse_expr(src: str) -> Expr:
    """Parse ``src`` into an expression tree.

    Raises:
        ParseError: text outside the grammar, with byte offset and the
            sorted set of tokens that would have been accepted
        InvalidIndexError: h(k/m) with m < 2 or |k| > m - 1
    """
    parser = _Parser(src)
    node = parser.expr()
    if parser.current.kind != "end":
        raise parser.error({"+", "-", "*", "/", "^", END})
    return node
