"""A second, deliberately naive interpreter used as a differential oracle.

Every subexpression is materialized as a dense tensor with explicit loops, the
way one would compute it by hand. Nothing here is shared with the element-wise
evaluator in :mod:`tensorlang.evaluate` beyond the value singleton and the
store container; shapes and arithmetic are worked out locally.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from tensorlang.evaluate import UNDEF, Store
from tensorlang.syntax import Contract, Elem, OuterProduct, Paren, Program, Transpose, Var

_ZERO = Fraction(0)

# Dense tensor: (shape, {index: value}).


def _indices(shape):
    return itertools.product(*[range(1, d + 1) for d in shape])


def _is_zero(v):
    return v is not UNDEF and v == 0


def _binop(op, a, b, mode):
    if op == "+":
        return UNDEF if a is UNDEF or b is UNDEF else a + b
    if op == "-":
        return UNDEF if a is UNDEF or b is UNDEF else a - b
    if op == "*":
        if a is UNDEF or b is UNDEF:
            if mode == "annihilating" and (_is_zero(a) or _is_zero(b)):
                return _ZERO
            return UNDEF
        return a * b
    # division
    if b is UNDEF:
        return _ZERO if mode != "extended" and _is_zero(a) else UNDEF
    if b == 0:
        return _ZERO if mode != "extended" and _is_zero(a) else UNDEF
    if a is UNDEF:
        return UNDEF
    return a / b


class _Oracle:
    def __init__(self, tensors, mode):
        self.tensors = tensors
        self.mode = mode

    def tensor(self, e):
        if isinstance(e, Var):
            shape, data = self.tensors[e.name]
            return shape, dict(data)
        if isinstance(e, Paren):
            return self.tensor(e.inner)
        if isinstance(e, OuterProduct):
            sa, a = self.tensor(e.left)
            sb, b = self.tensor(e.right)
            out = {}
            for i in _indices(sa):
                for j in _indices(sb):
                    out[i + j] = _binop("*", a[i], b[j], self.mode)
            return sa + sb, out
        if isinstance(e, Transpose):
            s, a = self.tensor(e.operand)
            m, n = sorted((e.pair.m, e.pair.n))
            perm = list(range(len(s)))
            perm[m - 1], perm[n - 1] = perm[n - 1], perm[m - 1]
            shape = tuple(s[p] for p in perm)
            out = {}
            for i in _indices(shape):
                src = tuple(i[p] for p in perm)
                out[i] = a[src]
            return shape, out
        if isinstance(e, Contract):
            s, a = self.tensor(e.operand)
            m, n = sorted((e.pair.m, e.pair.n))
            assert s[m - 1] == s[n - 1], "ill-typed contraction reached the oracle"
            keep = [k for k in range(len(s)) if k not in (m - 1, n - 1)]
            shape = tuple(s[k] for k in keep)
            out = {}
            for i in _indices(shape):
                total = _ZERO
                for l in range(1, s[m - 1] + 1):
                    full = [0] * len(s)
                    for pos, k in enumerate(keep):
                        full[k] = i[pos]
                    full[m - 1] = l
                    full[n - 1] = l
                    total = _binop("+", total, a[tuple(full)], self.mode)
                out[i] = total
            return shape, out
        if isinstance(e, Elem):
            sa, a = self.tensor(e.left)
            sb, b = self.tensor(e.right)
            if e.op == "*" and sa == ():
                return sb, {j: _binop("*", a[()], b[j], self.mode) for j in _indices(sb)}
            if e.op == "/" and sb == ():
                return sa, {i: _binop("/", a[i], b[()], self.mode) for i in _indices(sa)}
            assert sa == sb, "ill-typed element-wise operation reached the oracle"
            return sa, {i: _binop(e.op, a[i], b[i], self.mode) for i in _indices(sa)}
        raise TypeError(f"not an expression: {e!r}")


def oracle_eval(p: Program, init=None, mode: str = "controlled") -> Store:
    """Final store of ``p`` computed tensor-at-a-time; assumes ``p`` is well-formed."""
    init = init or {}
    tensors = {}
    for d in p.declarations:
        values = init.get(d.name)
        cells = {}
        for k, i in enumerate(_indices(d.shape)):
            cells[i] = UNDEF if values is None else values[k]
        tensors[d.name] = (tuple(d.shape), cells)
    oracle = _Oracle(tensors, str(getattr(mode, "value", mode)))
    for s in p.statements:
        shape, data = oracle.tensor(s.rhs)
        assert shape == tensors[s.lhs][0], "ill-typed assignment reached the oracle"
        tensors[s.lhs] = (shape, data)
    store = Store()
    for name, (_, data) in tensors.items():
        for i, v in data.items():
            store.cells[name, i] = v
    return store
