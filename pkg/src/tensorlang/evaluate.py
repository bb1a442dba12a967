"""Reference evaluation over exact rationals extended with an undefined value.

Values are :class:`fractions.Fraction` instances or the singleton :data:`UNDEF`.
A :class:`Store` maps ``(identifier, multi-index)`` to a value. Expressions are
evaluated one element at a time (``eval_expr``); a statement evaluates every
element of its right-hand side against the old store before writing any of
them back.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from tensorlang.index import MultiIndex, enumerate_indices, size
from tensorlang.syntax import (
    Contract, Elem, Expr, OuterProduct, Paren, Program, Qualifier, Statement,
    Transpose, Var,
)
from tensorlang.typecheck import (
    StaticContext, check_program, insert_pair, normalize_pair, swap, type_expr,
)


class _Undefined:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDEF"

    def __reduce__(self):
        return (_Undefined, ())


UNDEF = _Undefined()
Value = Union[Fraction, _Undefined]
InitSpec = Mapping[str, Sequence[Value]]

ZERO = Fraction(0)


class Mode(str, enum.Enum):
    EXTENDED = "extended"
    CONTROLLED = "controlled"
    # controlled division plus 0 * UNDEF = UNDEF * 0 = 0; not the default
    ANNIHILATING = "annihilating"


def arith(op: str, a: Value, b: Value, mode: Mode = Mode.CONTROLLED) -> Value:
    """Total arithmetic on rationals plus UNDEF.

    UNDEF absorbs everything and division by zero is UNDEF. Controlled mode
    additionally makes ``0 / 0`` and ``0 / UNDEF`` equal to 0. Annihilating
    mode is controlled mode where a zero factor also wins over UNDEF.
    """
    if op == "/":
        if b is UNDEF or b == 0:
            if mode is not Mode.EXTENDED and a is not UNDEF and a == 0:
                return ZERO
            return UNDEF
        if a is UNDEF:
            return UNDEF
        return a / b
    if a is UNDEF or b is UNDEF:
        if op == "*" and mode is Mode.ANNIHILATING and (a == 0 or b == 0):
            return ZERO
        return UNDEF
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    raise ValueError(f"unknown operator {op!r}")


def format_value(v: Value) -> str:
    return "_" if v is UNDEF else str(v)


def parse_value(text: str) -> Value:
    if text == "_":
        return UNDEF
    return Fraction(text)


# --------------------------------------------------------------------------- #
# Stores

class AccessViolation(Exception):
    def __init__(self, kind: str, name: str, index: MultiIndex):
        super().__init__(f"out-of-domain {kind} of {name}{list(index)}")
        self.kind = kind
        self.name = name
        self.index = index


class Store:
    """Map from subscripted identifiers to values.

    Reads outside the domain always raise :class:`AccessViolation`. When
    ``armed``, writes outside the domain raise too; every violation is
    appended to ``violations``.
    """

    __slots__ = ("cells", "armed", "violations")

    def __init__(self, cells: Mapping[tuple[str, MultiIndex], Value] | None = None, armed: bool = False):
        self.cells: dict[tuple[str, MultiIndex], Value] = dict(cells or {})
        self.armed = armed
        self.violations: list[AccessViolation] = []

    def read(self, name: str, index: MultiIndex) -> Value:
        try:
            return self.cells[name, index]
        except KeyError:
            err = AccessViolation("read", name, index)
            self.violations.append(err)
            raise err from None

    def write(self, name: str, index: MultiIndex, value: Value) -> None:
        key = (name, index)
        if self.armed and key not in self.cells:
            err = AccessViolation("write", name, index)
            self.violations.append(err)
            raise err
        self.cells[key] = value

    def __getitem__(self, key: tuple[str, MultiIndex]) -> Value:
        return self.read(*key)

    def __contains__(self, key: object) -> bool:
        return key in self.cells

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Store) and self.cells == other.cells

    def __len__(self) -> int:
        return len(self.cells)

    def __repr__(self) -> str:
        return f"Store({len(self.cells)} cells)"

    def domain(self) -> set[tuple[str, MultiIndex]]:
        return set(self.cells)

    def copy(self) -> "Store":
        new = Store(self.cells, self.armed)
        new.violations = self.violations
        return new

    def tensor(self, name: str, t: Iterable[int]) -> list[Value]:
        """Values of ``name`` over ``t`` in row-major order."""
        return [self.read(name, i) for i in enumerate_indices(tuple(t))]


class InitError(Exception):
    pass


class UnknownIdentifier(InitError):
    pass


class ShapeMismatch(InitError):
    pass


class InputUninitialized(InitError):
    pass


def validate_init(ctx: StaticContext, init: InitSpec) -> None:
    for name, values in init.items():
        if name not in ctx:
            raise UnknownIdentifier(f"initial values given for undeclared variable {name!r}")
        if len(values) != size(ctx[name]):
            raise ShapeMismatch(f"{name!r} has {size(ctx[name])} elements, "
                                f"{len(values)} initial values given")
    for name in ctx.with_names(Qualifier.INPUT):
        values = init.get(name)
        if values is None or any(v is UNDEF for v in values):
            raise InputUninitialized(f"input variable {name!r} must be fully initialized")


def init_store(ctx: StaticContext, init: InitSpec, armed: bool = False) -> Store:
    validate_init(ctx, init)
    store = Store(armed=armed)
    for name, t in ctx.items():
        values = init.get(name)
        for k, i in enumerate(enumerate_indices(t)):
            store.cells[name, i] = UNDEF if values is None else values[k]
    return store


# --------------------------------------------------------------------------- #
# Expression evaluation

class Evaluator:
    """Element-wise evaluation of expressions under a fixed context and store.

    Subexpression types are computed once and cached by node identity; the
    evaluator must not outlive the expressions it has seen.
    """

    def __init__(self, ctx: StaticContext, store: Store, mode: Mode = Mode.CONTROLLED):
        self.ctx = ctx
        self.store = store
        self.mode = mode
        self._types: dict[int, tuple] = {}
        self._pairs: dict[int, tuple[int, int]] = {}

    def type_of(self, e: Expr) -> tuple:
        t = self._types.get(id(e))
        if t is None:
            t = self._types[id(e)] = type_expr(self.ctx, e)
        return t

    def _pair(self, e: Contract | Transpose) -> tuple[int, int]:
        mn = self._pairs.get(id(e))
        if mn is None:
            mn = self._pairs[id(e)] = normalize_pair(e.pair, len(self.type_of(e.operand)), e.pos)
        return mn

    def value(self, e: Expr, i: MultiIndex) -> Value:
        if isinstance(e, Var):
            return self.store.read(e.name, i)
        if isinstance(e, Paren):
            return self.value(e.inner, i)
        if isinstance(e, OuterProduct):
            k = len(self.type_of(e.left))
            return arith("*", self.value(e.left, i[:k]), self.value(e.right, i[k:]), self.mode)
        if isinstance(e, Transpose):
            m, n = self._pair(e)
            return self.value(e.operand, swap(i, m, n))
        if isinstance(e, Contract):
            m, n = self._pair(e)
            bound = self.type_of(e.operand)[m - 1]
            total = self.value(e.operand, insert_pair(i, m, n, 1))
            for l in range(2, bound + 1):
                total = arith("+", total, self.value(e.operand, insert_pair(i, m, n, l)), self.mode)
            return total
        if isinstance(e, Elem):
            if e.op == "*" and self.type_of(e.left) == ():
                return arith("*", self.value(e.left, ()), self.value(e.right, i), self.mode)
            if e.op == "/" and self.type_of(e.right) == ():
                return arith("/", self.value(e.left, i), self.value(e.right, ()), self.mode)
            return arith(e.op, self.value(e.left, i), self.value(e.right, i), self.mode)
        raise TypeError(f"not an expression: {e!r}")


def eval_expr(ctx: StaticContext, store: Store, e: Expr, i: MultiIndex,
              mode: Mode = Mode.CONTROLLED) -> Value:
    return Evaluator(ctx, store, mode).value(e, tuple(i))


def exec_stmt(ctx: StaticContext, store: Store, s: Statement, mode: Mode = Mode.CONTROLLED) -> Store:
    ev = Evaluator(ctx, store, mode)
    r = [(i, ev.value(s.rhs, i)) for i in enumerate_indices(ctx[s.lhs])]
    new = store.copy()
    for i, v in r:
        new.write(s.lhs, i, v)
    return new


def run_statements(ctx: StaticContext, store: Store, statements: Iterable[Statement],
                   mode: Mode = Mode.CONTROLLED) -> Store:
    for s in statements:
        store = exec_stmt(ctx, store, s, mode)
    return store


def run(p: Program, init: InitSpec | None = None, mode: Mode = Mode.CONTROLLED,
        armed: bool = False) -> Store:
    """Type-check ``p`` and evaluate it from the initial store built from ``init``."""
    ctx = check_program(p)
    store = init_store(ctx, init or {}, armed)
    return run_statements(ctx, store, p.statements, mode)
