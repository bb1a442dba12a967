"""Text format for initial and final stores.

One block per tensor, blocks separated by blank lines::

    A : [2 3]
    1 2 3
    4 5/2 _

The header names the tensor and its logical shape; the entries follow in
row-major order (integers, fractions ``p/q``, or ``_`` for undefined). The
writer puts one row of the last dimension per line. When a padded store is
dumped with its padding, the padding cells of a tensor follow its logical
entries under a ``# padding : [...]`` line giving the rounded shape, again in
row-major order over the rounded shape.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from tensorlang.evaluate import (
    InitError, ShapeMismatch, Store, UnknownIdentifier, Value, format_value, parse_value,
)
from tensorlang.index import TensorType, enumerate_indices, padding_indices, round_up_type, size
from tensorlang.typecheck import StaticContext

_HEADER = re.compile(r"^([a-zA-Z][a-zA-Z0-9]*)\s*:\s*\[([0-9\s]*)\]$")
_PAD_HEADER = re.compile(r"^#\s*padding\s*:\s*\[([0-9\s]*)\]$")


class StoreFormatError(InitError):
    pass


@dataclass
class Block:
    name: str
    shape: TensorType
    values: list[Value]
    padded_shape: TensorType | None = None
    padding: list[Value] = field(default_factory=list)


def _rows(values: list[Value], width: int) -> list[str]:
    width = max(width, 1)
    return [" ".join(format_value(v) for v in values[k:k + width])
            for k in range(0, len(values), width)] or [""]


def format_block(name: str, shape: TensorType, values: list[Value],
                 padded_shape: TensorType | None = None, padding: list[Value] | None = None) -> str:
    lines = [f"{name} : [{' '.join(map(str, shape))}]"]
    lines += _rows(values, shape[-1] if shape else 1)
    if padded_shape is not None:
        lines.append(f"# padding : [{' '.join(map(str, padded_shape))}]")
        if padding:
            lines += _rows(padding, padded_shape[-1] if padded_shape else 1)
    return "\n".join(lines)


def format_store(ctx: StaticContext, store: Store, names: Iterable[str] | None = None,
                 pad: int | None = None) -> str:
    """Dump ``names`` (default: all, in declaration order) from ``store``.

    ``ctx`` is the logical context. With ``pad`` set, padding cells of the
    rounded shapes are appended to each block.
    """
    wanted = set(ctx) if names is None else set(names)
    blocks = []
    for name, t in ctx.items():
        if name not in wanted:
            continue
        values = store.tensor(name, t)
        if pad is None:
            blocks.append(format_block(name, t, values))
        else:
            padding = [store.read(name, i) for i in padding_indices(t, pad)]
            blocks.append(format_block(name, t, values, round_up_type(t, pad), padding))
    return "\n\n".join(blocks) + "\n"


def parse_store_text(text: str) -> dict[str, Block]:
    blocks: dict[str, Block] = {}
    current: Block | None = None
    in_padding = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        header = _HEADER.match(line)
        if header:
            name = header.group(1)
            if name in blocks:
                raise StoreFormatError(f"line {lineno}: duplicate block for {name!r}")
            current = blocks[name] = Block(name, tuple(int(d) for d in header.group(2).split()), [])
            in_padding = False
            continue
        pad_header = _PAD_HEADER.match(line)
        if pad_header:
            if current is None:
                raise StoreFormatError(f"line {lineno}: padding section outside a block")
            current.padded_shape = tuple(int(d) for d in pad_header.group(1).split())
            in_padding = True
            continue
        if current is None:
            raise StoreFormatError(f"line {lineno}: entries before the first block header")
        try:
            values = [parse_value(tok) for tok in line.split()]
        except (ValueError, ZeroDivisionError):
            raise StoreFormatError(f"line {lineno}: malformed entry in {line!r}") from None
        (current.padding if in_padding else current.values).extend(values)
    for b in blocks.values():
        if len(b.values) != size(b.shape):
            raise StoreFormatError(f"block {b.name!r} of shape {list(b.shape)} has "
                                   f"{len(b.values)} entries, expected {size(b.shape)}")
        if b.padded_shape is not None:
            want = size(b.padded_shape) - size(b.shape)
            if len(b.padded_shape) != len(b.shape) or any(
                    p < d for p, d in zip(b.padded_shape, b.shape)):
                raise StoreFormatError(f"block {b.name!r}: padded shape {list(b.padded_shape)} "
                                       f"does not contain {list(b.shape)}")
            if len(b.padding) != want:
                raise StoreFormatError(f"block {b.name!r} has {len(b.padding)} padding entries, "
                                       f"expected {want}")
    return blocks


def load_init(ctx: StaticContext, text: str) -> dict[str, list[Value]]:
    """Parse an initial-store file against ``ctx``; padding sections are rejected."""
    init = {}
    for name, b in parse_store_text(text).items():
        if name not in ctx:
            raise UnknownIdentifier(f"store file mentions undeclared variable {name!r}")
        if b.shape != ctx[name]:
            raise ShapeMismatch(f"{name!r} is declared {list(ctx[name])}, "
                                f"store file gives {list(b.shape)}")
        if b.padded_shape is not None:
            raise StoreFormatError(f"initial store may not set padding cells of {name!r}")
        init[name] = b.values
    return init


def store_from_blocks(blocks: dict[str, Block]) -> Store:
    """Rebuild a store (logical cells only) from parsed blocks."""
    store = Store()
    for b in blocks.values():
        for i, v in zip(enumerate_indices(b.shape), b.values):
            store.cells[b.name, i] = v
    return store
