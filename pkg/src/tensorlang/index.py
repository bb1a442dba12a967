"""Multi-indices and tensor types.

Both are plain tuples of positive integers. A tensor type ``t`` describes the
extents of each dimension; the elements of a tensor of type ``t`` are addressed
by every multi-index ``i`` with ``leq(i, t)``. Components are 1-based.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator, Sequence

MultiIndex = tuple[int, ...]
TensorType = tuple[int, ...]


def tensor_type(extents: Sequence[int]) -> TensorType:
    t = tuple(int(d) for d in extents)
    for d in t:
        if d < 1:
            raise ValueError(f"tensor extents must be positive, got {t}")
    return t


def _same_rank(i: MultiIndex, j: MultiIndex) -> None:
    if len(i) != len(j):
        raise ValueError(f"rank mismatch: {i} vs {j}")


def leq(i: MultiIndex, j: MultiIndex) -> bool:
    """Componentwise order; only defined within one rank."""
    _same_rank(i, j)
    return all(a <= b for a, b in zip(i, j))


def in_interval(k: MultiIndex, i: MultiIndex, j: MultiIndex) -> bool:
    """``k in (i, j)``: not below ``i`` but below ``j``.

    With ``i = t`` and ``j = round_up_type(t, M)`` this selects the padding cells.
    """
    _same_rank(k, i)
    _same_rank(k, j)
    return not leq(k, i) and leq(k, j)


def project(l: int, i: MultiIndex) -> int:
    if not 1 <= l <= len(i):
        raise ValueError(f"projection {l} out of range for rank {len(i)}")
    return i[l - 1]


def _check_vector_length(M: int) -> None:
    if M < 1:
        raise ValueError(f"vector length must be >= 1, got {M}")


def round_up(d: int, M: int) -> int:
    """Smallest multiple of ``M`` that is >= ``d``."""
    _check_vector_length(M)
    if d < 0:
        raise ValueError(f"cannot round negative extent {d}")
    return -(-d // M) * M


def round_up_type(t: TensorType, M: int) -> TensorType:
    _check_vector_length(M)
    return tuple(round_up(d, M) for d in t)


def enumerate_indices(t: TensorType) -> Iterator[MultiIndex]:
    """All ``i <= t`` in row-major order; a scalar type yields ``()`` once."""
    return itertools.product(*(range(1, d + 1) for d in t))


def size(t: TensorType) -> int:
    return math.prod(t)


def padding_indices(t: TensorType, M: int) -> Iterator[MultiIndex]:
    """Indices in ``(t, round_up_type(t, M))``, row-major over the rounded type."""
    for i in enumerate_indices(round_up_type(t, M)):
        if any(a > b for a, b in zip(i, t)):
            yield i
