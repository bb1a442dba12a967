"""Lexer, parser and pretty-printer for tensor programs.

Concrete syntax::

    prog  ::= decl* stmt*
    decl  ::= 'var' ['input' | 'output'] id ':' '[' int* ']'
    stmt  ::= id '=' expr
    expr  ::= id | '(' expr ')' | expr op expr
            | expr '.' '[' int int ']' | expr '^' '[' int int ']'
    op    ::= '+' | '-' | '*' | '/' | '#'

All infix and postfix operators live on one precedence level and associate to
the left, so ``A # B . [2 3]`` is a contraction of the outer product. There is
no statement separator: a statement starts wherever an identifier is directly
followed by ``=``. ``//`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Union


class TokenKind(enum.Enum):
    KW_VAR = "var"
    KW_INPUT = "input"
    KW_OUTPUT = "output"
    IDENT = "identifier"
    INT = "integer"
    LBRACKET = "["
    RBRACKET = "]"
    COLON = ":"
    EQUALS = "="
    LPAREN = "("
    RPAREN = ")"
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    SLASH = "/"
    HASH = "#"
    PERIOD = "."
    CARET = "^"
    EOF = "end of input"


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOPOS = Pos(0, 0)


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    pos: Pos


class SyntaxProblem(Exception):
    """Base for lexing and parsing failures; carries a source position."""

    kind = "SyntaxError"

    def __init__(self, message: str, pos: Pos):
        super().__init__(f"{pos}: {message}")
        self.message = message
        self.pos = pos


class LexError(SyntaxProblem):
    kind = "LexError"


class ParseError(SyntaxProblem):
    kind = "ParseError"

    def __init__(self, message: str, pos: Pos, expected: frozenset[TokenKind] = frozenset()):
        super().__init__(message, pos)
        self.expected = expected


# --------------------------------------------------------------------------- #
# AST

class Qualifier(str, enum.Enum):
    NONE = "none"
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class Declaration:
    name: str
    shape: tuple[int, ...]
    qualifier: Qualifier = Qualifier.NONE
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class IndexPair:
    m: int
    n: int


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Paren:
    inner: "Expr"
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Elem:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class OuterProduct:
    left: "Expr"
    right: "Expr"
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Contract:
    operand: "Expr"
    pair: IndexPair
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Transpose:
    operand: "Expr"
    pair: IndexPair
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


Expr = Union[Var, Paren, Elem, OuterProduct, Contract, Transpose]


@dataclass(frozen=True)
class Statement:
    lhs: str
    rhs: Expr
    pos: Pos = field(default=NOPOS, compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    declarations: tuple[Declaration, ...]
    statements: tuple[Statement, ...]


def variables(e: Expr) -> list[str]:
    """Identifiers read by ``e``, in left-to-right order, with repeats."""
    if isinstance(e, Var):
        return [e.name]
    if isinstance(e, Paren):
        return variables(e.inner)
    if isinstance(e, (Elem, OuterProduct)):
        return variables(e.left) + variables(e.right)
    return variables(e.operand)


# --------------------------------------------------------------------------- #
# Lexer

_KEYWORDS = {"var": TokenKind.KW_VAR, "input": TokenKind.KW_INPUT, "output": TokenKind.KW_OUTPUT}
_PUNCT = {
    "[": TokenKind.LBRACKET, "]": TokenKind.RBRACKET, ":": TokenKind.COLON,
    "=": TokenKind.EQUALS, "(": TokenKind.LPAREN, ")": TokenKind.RPAREN,
    "+": TokenKind.PLUS, "-": TokenKind.MINUS, "*": TokenKind.STAR,
    "/": TokenKind.SLASH, "#": TokenKind.HASH, ".": TokenKind.PERIOD,
    "^": TokenKind.CARET,
}
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>//[^\n]*)|(?P<ident>[a-zA-Z][a-zA-Z0-9]*)"
    r"|(?P<int>[0-9]+)|(?P<punct>[\[\]:=()+\-*/#.^])"
)


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        where = Pos(line, pos - line_start + 1)
        if m is None:
            raise LexError(f"unexpected character {source[pos]!r}", where)
        kind = m.lastgroup
        text = m.group()
        if kind == "ident":
            tokens.append(Token(_KEYWORDS.get(text, TokenKind.IDENT), text, where))
        elif kind == "int":
            tokens.append(Token(TokenKind.INT, text, where))
        elif kind == "punct":
            tokens.append(Token(_PUNCT[text], text, where))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token(TokenKind.EOF, "", Pos(line, pos - line_start + 1)))
    return tokens


# --------------------------------------------------------------------------- #
# Parser

_INFIX = {
    TokenKind.PLUS: "+", TokenKind.MINUS: "-", TokenKind.STAR: "*",
    TokenKind.SLASH: "/", TokenKind.HASH: "#",
}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.k = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.k]

    def peek(self, ahead: int = 1) -> Token:
        return self.tokens[min(self.k + ahead, len(self.tokens) - 1)]

    def expect(self, *kinds: TokenKind) -> Token:
        tok = self.tok
        if tok.kind not in kinds:
            want = " or ".join(repr(k.value) for k in kinds)
            got = tok.text or tok.kind.value
            raise ParseError(f"expected {want}, got {got!r}", tok.pos, frozenset(kinds))
        self.k += 1
        return tok

    def program(self) -> Program:
        decls = []
        while self.tok.kind is TokenKind.KW_VAR:
            decls.append(self.declaration())
        stmts = []
        while self.tok.kind is not TokenKind.EOF:
            if self.tok.kind is TokenKind.KW_VAR:
                raise ParseError("declaration after the first statement", self.tok.pos)
            stmts.append(self.statement())
        return Program(tuple(decls), tuple(stmts))

    def declaration(self) -> Declaration:
        start = self.expect(TokenKind.KW_VAR)
        qualifier = Qualifier.NONE
        if self.tok.kind is TokenKind.KW_INPUT:
            qualifier = Qualifier.INPUT
            self.k += 1
        elif self.tok.kind is TokenKind.KW_OUTPUT:
            qualifier = Qualifier.OUTPUT
            self.k += 1
        name = self.expect(TokenKind.IDENT).text
        self.expect(TokenKind.COLON)
        self.expect(TokenKind.LBRACKET)
        extents = []
        while self.tok.kind is TokenKind.INT:
            extents.append(int(self.tok.text))
            self.k += 1
        self.expect(TokenKind.RBRACKET, TokenKind.INT)
        return Declaration(name, tuple(extents), qualifier, start.pos)

    def statement(self) -> Statement:
        lhs = self.expect(TokenKind.IDENT)
        self.expect(TokenKind.EQUALS)
        return Statement(lhs.text, self.expr(), lhs.pos)

    def at_statement_start(self) -> bool:
        return self.tok.kind is TokenKind.IDENT and self.peek().kind is TokenKind.EQUALS

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind is TokenKind.IDENT and not self.at_statement_start():
            self.k += 1
            return Var(tok.text, tok.pos)
        if tok.kind is TokenKind.LPAREN:
            self.k += 1
            inner = self.expr()
            self.expect(TokenKind.RPAREN)
            return Paren(inner, tok.pos)
        raise ParseError(
            f"expected an expression, got {tok.text or tok.kind.value!r}",
            tok.pos, frozenset({TokenKind.IDENT, TokenKind.LPAREN}),
        )

    def pair(self) -> IndexPair:
        self.expect(TokenKind.LBRACKET)
        m = int(self.expect(TokenKind.INT).text)
        n = int(self.expect(TokenKind.INT).text)
        self.expect(TokenKind.RBRACKET)
        return IndexPair(m, n)

    def expr(self) -> Expr:
        left = self.primary()
        while True:
            tok = self.tok
            if tok.kind in _INFIX:
                self.k += 1
                right = self.primary()
                if tok.kind is TokenKind.HASH:
                    left = OuterProduct(left, right, tok.pos)
                else:
                    left = Elem(_INFIX[tok.kind], left, right, tok.pos)
            elif tok.kind is TokenKind.PERIOD:
                self.k += 1
                left = Contract(left, self.pair(), tok.pos)
            elif tok.kind is TokenKind.CARET:
                self.k += 1
                left = Transpose(left, self.pair(), tok.pos)
            else:
                return left


def parse(tokens: list[Token]) -> Program:
    return _Parser(tokens).program()


def parse_program(source: str) -> Program:
    return parse(tokenize(source))


def parse_expr(source: str) -> Expr:
    p = _Parser(tokenize(source))
    e = p.expr()
    p.expect(TokenKind.EOF)
    return e


# --------------------------------------------------------------------------- #
# Pretty-printer

def _atomic(e: Expr) -> bool:
    return isinstance(e, (Var, Paren))


def format_expr(e: Expr) -> str:
    # Paren nodes print as written; a compound right operand of an infix
    # operator cannot be expressed without brackets, so those get one.
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Paren):
        return f"({format_expr(e.inner)})"
    if isinstance(e, (Elem, OuterProduct)):
        op = e.op if isinstance(e, Elem) else "#"
        right = format_expr(e.right)
        if not _atomic(e.right):
            right = f"({right})"
        return f"{format_expr(e.left)} {op} {right}"
    sym = "." if isinstance(e, Contract) else "^"
    return f"{format_expr(e.operand)} {sym} [{e.pair.m} {e.pair.n}]"


def format_declaration(d: Declaration) -> str:
    qual = "" if d.qualifier is Qualifier.NONE else f"{d.qualifier.value} "
    return f"var {qual}{d.name} : [{' '.join(map(str, d.shape))}]"


def pretty_print(p: Program) -> str:
    lines = [format_declaration(d) for d in p.declarations]
    if p.statements:
        if lines:
            lines.append("")
        lines.extend(f"{s.lhs} = {format_expr(s.rhs)}" for s in p.statements)
    return "".join(line + "\n" for line in lines)
