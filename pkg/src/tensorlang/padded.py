"""Evaluation over a store whose extents are rounded up to the vector length.

Every dimension of every tensor is padded to a multiple of ``M`` and the
padding is zero-filled. Statements then run with the ordinary evaluator under
the rounded context, so each assignment covers the padding too and each
contraction sums over the rounded extent.
"""

from __future__ import annotations

from dataclasses import dataclass

from tensorlang.evaluate import (
    ZERO, UNDEF, InitSpec, Mode, Store, run_statements, validate_init,
)
from tensorlang.index import enumerate_indices, padding_indices, round_up_type
from tensorlang.syntax import Program
from tensorlang.typecheck import StaticContext, check_program


def round_context(ctx: StaticContext, M: int) -> StaticContext:
    return StaticContext({x: round_up_type(t, M) for x, t in ctx.items()}, dict(ctx.qualifiers))


def init_padded_store(ctx: StaticContext, init: InitSpec, M: int, armed: bool = False,
                      zero_fill: bool = True) -> Store:
    """Initial store over the rounded shapes of ``ctx``.

    ``init`` addresses the logical region only. ``zero_fill=False`` leaves the
    padding undefined; it exists to check that the difference is detectable.
    """
    validate_init(ctx, init)
    store = Store(armed=armed)
    pad_value = ZERO if zero_fill else UNDEF
    for name, t in ctx.items():
        values = init.get(name)
        for k, i in enumerate(enumerate_indices(t)):
            store.cells[name, i] = UNDEF if values is None else values[k]
        for i in padding_indices(t, M):
            store.cells[name, i] = pad_value
    return store


@dataclass
class PaddedRun:
    M: int
    logical_ctx: StaticContext
    rounded_ctx: StaticContext
    store: Store

    def padding_violations(self) -> list[tuple[str, tuple[int, ...]]]:
        """Padding cells that do not hold exactly 0."""
        bad = []
        for name, t in self.logical_ctx.items():
            for i in padding_indices(t, self.M):
                v = self.store.cells[name, i]
                if v is UNDEF or v != 0:
                    bad.append((name, i))
        return bad


def padded_run(p: Program, init: InitSpec | None, M: int, mode: Mode = Mode.CONTROLLED,
               armed: bool = False, zero_fill: bool = True) -> PaddedRun:
    ctx = check_program(p)
    rounded = round_context(ctx, M)
    store = init_padded_store(ctx, init or {}, M, armed, zero_fill)
    store = run_statements(rounded, store, p.statements, mode)
    return PaddedRun(M, ctx, rounded, store)


def run_padded(p: Program, init: InitSpec | None, M: int, mode: Mode = Mode.CONTROLLED,
               armed: bool = False) -> Store:
    return padded_run(p, init, M, mode, armed).store
