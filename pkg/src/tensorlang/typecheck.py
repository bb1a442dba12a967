"""Static contexts, expression typing and program well-formedness.

Typing is syntax-directed and exact: no broadcasting, no subtyping. The only
ways a program can be ill-formed are enumerated by :class:`ErrorKind`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from tensorlang.index import TensorType
from tensorlang.syntax import (
    NOPOS, Contract, Declaration, Elem, Expr, IndexPair, OuterProduct, Paren,
    Pos, Program, Qualifier, Transpose, Var,
)


class ErrorKind(str, enum.Enum):
    REDECLARATION = "Redeclaration"
    ASSIGN_TO_UNDECLARED = "AssignToUndeclared"
    ASSIGN_TYPE_MISMATCH = "AssignTypeMismatch"
    USE_OF_UNDECLARED = "UseOfUndeclared"
    EXPR_TYPE_MISMATCH = "ExprTypeMismatch"
    BAD_INDEX_PAIR = "BadIndexPair"
    ZERO_EXTENT = "ZeroExtent"


class TypeCheckError(Exception):
    def __init__(self, kind: ErrorKind, message: str, pos: Pos = NOPOS, name: str | None = None,
                 types: tuple[TensorType, ...] = ()):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.pos = pos
        self.name = name
        self.types = types

    def __str__(self) -> str:
        return f"ERROR {self.kind.value} at {self.pos}: {self.message}"


@dataclass
class StaticContext:
    """Identifier -> tensor type, in declaration order, plus qualifiers."""

    types: dict[str, TensorType] = field(default_factory=dict)
    qualifiers: dict[str, Qualifier] = field(default_factory=dict)

    def __getitem__(self, name: str) -> TensorType:
        return self.types[name]

    def __contains__(self, name: object) -> bool:
        return name in self.types

    def __iter__(self) -> Iterator[str]:
        return iter(self.types)

    def __len__(self) -> int:
        return len(self.types)

    def items(self):
        return self.types.items()

    def qualifier(self, name: str) -> Qualifier:
        return self.qualifiers.get(name, Qualifier.NONE)

    def with_names(self, qualifier: Qualifier) -> list[str]:
        return [x for x in self.types if self.qualifier(x) is qualifier]

    @classmethod
    def of(cls, types: Mapping[str, Iterable[int]], qualifiers: Mapping[str, Qualifier] | None = None
           ) -> "StaticContext":
        return cls({x: tuple(t) for x, t in types.items()}, dict(qualifiers or {}))


def build_context(decls: Iterable[Declaration]) -> StaticContext:
    ctx = StaticContext()
    for d in decls:
        if d.name in ctx:
            raise TypeCheckError(ErrorKind.REDECLARATION, f"variable {d.name!r} is already declared",
                                 d.pos, d.name)
        if any(extent < 1 for extent in d.shape):
            raise TypeCheckError(ErrorKind.ZERO_EXTENT,
                                 f"variable {d.name!r} has a zero extent in {list(d.shape)}",
                                 d.pos, d.name, (d.shape,))
        ctx.types[d.name] = tuple(d.shape)
        ctx.qualifiers[d.name] = d.qualifier
    return ctx


def normalize_pair(pair: IndexPair, rank: int, pos: Pos = NOPOS) -> tuple[int, int]:
    """Validate a dimension pair against ``rank`` and return it as ``(lo, hi)``."""
    m, n = pair.m, pair.n
    if m == n or not (1 <= m <= rank and 1 <= n <= rank):
        raise TypeCheckError(ErrorKind.BAD_INDEX_PAIR,
                             f"dimension pair [{m} {n}] is invalid for rank {rank}", pos)
    return min(m, n), max(m, n)


def swap(t: tuple, m: int, n: int) -> tuple:
    """Swap 1-based positions ``m`` and ``n``."""
    lst = list(t)
    lst[m - 1], lst[n - 1] = lst[n - 1], lst[m - 1]
    return tuple(lst)


def delete_pair(t: tuple, m: int, n: int) -> tuple:
    """Drop 1-based positions ``m < n``."""
    return t[:m - 1] + t[m:n - 1] + t[n:]


def insert_pair(t: tuple, m: int, n: int, value) -> tuple:
    """Inverse of :func:`delete_pair`: put ``value`` at positions ``m < n``."""
    out = t[:m - 1] + (value,) + t[m - 1:]
    return out[:n - 1] + (value,) + out[n - 1:]


def type_expr(ctx: StaticContext, e: Expr) -> TensorType:
    if isinstance(e, Var):
        if e.name not in ctx:
            raise TypeCheckError(ErrorKind.USE_OF_UNDECLARED, f"variable {e.name!r} is not declared",
                                 e.pos, e.name)
        return ctx[e.name]
    if isinstance(e, Paren):
        return type_expr(ctx, e.inner)
    if isinstance(e, OuterProduct):
        return type_expr(ctx, e.left) + type_expr(ctx, e.right)
    if isinstance(e, Transpose):
        t = type_expr(ctx, e.operand)
        m, n = normalize_pair(e.pair, len(t), e.pos)
        return swap(t, m, n)
    if isinstance(e, Contract):
        t = type_expr(ctx, e.operand)
        m, n = normalize_pair(e.pair, len(t), e.pos)
        if t[m - 1] != t[n - 1]:
            raise TypeCheckError(ErrorKind.EXPR_TYPE_MISMATCH,
                                 f"cannot contract dimensions {m} and {n} of {list(t)}: "
                                 f"extents {t[m - 1]} and {t[n - 1]} differ", e.pos, types=(t,))
        return delete_pair(t, m, n)
    if isinstance(e, Elem):
        t0 = type_expr(ctx, e.left)
        t1 = type_expr(ctx, e.right)
        if e.op == "*" and t0 == ():
            return t1
        if e.op == "/" and t1 == ():
            return t0
        if t0 != t1:
            raise TypeCheckError(ErrorKind.EXPR_TYPE_MISMATCH,
                                 f"operands of {e.op!r} have types {list(t0)} and {list(t1)}",
                                 e.pos, types=(t0, t1))
        return t0
    raise TypeError(f"not an expression: {e!r}")


def check_program(p: Program) -> StaticContext:
    """Return the static context of ``p`` or raise the first :class:`TypeCheckError`."""
    ctx = build_context(p.declarations)
    for s in p.statements:
        if s.lhs not in ctx:
            raise TypeCheckError(ErrorKind.ASSIGN_TO_UNDECLARED,
                                 f"assignment to undeclared variable {s.lhs!r}", s.pos, s.lhs)
        t = type_expr(ctx, s.rhs)
        if t != ctx[s.lhs]:
            raise TypeCheckError(ErrorKind.ASSIGN_TYPE_MISMATCH,
                                 f"cannot assign {list(t)} to {s.lhs!r} of type {list(ctx[s.lhs])}",
                                 s.pos, s.lhs, (ctx[s.lhs], t))
    return ctx
