"""Random well-formed programs and initial stores.

Generation is type-directed. From the declared tensors we first close a table
of *realizable* types (reachable from variables by transposition, contraction
and outer product, within rank and size limits), each with a small witness
expression. Statement right-hand sides are then built top-down for the
target's type, and every recursive choice asks only for realizable types, so
the result always type-checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from tensorlang.evaluate import UNDEF, ZERO, Value
from tensorlang.index import TensorType, size
from tensorlang.syntax import (
    Contract, Declaration, Elem, Expr, IndexPair, OuterProduct, Paren, Program,
    Qualifier, Statement, Transpose, Var,
)
from tensorlang.typecheck import StaticContext, build_context, delete_pair, swap

_NAMES = "ABCDEFGHIJKLMNOP"


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_rank: int = 3
    max_extent: int = 5
    max_statements: int = 6
    max_expr_depth: int = 4
    min_declarations: int = 2
    max_declarations: int = 6
    # (input, output) probability per declaration
    qualifier_probabilities: tuple[float, float] = (0.3, 0.3)
    division_probability: float = 0.2
    undefined_probability: float = 0.1
    zero_probability: float = 0.15
    # bounds on intermediate expression types, keep evaluation cheap
    max_intermediate_rank: int = 5
    max_intermediate_cells: int = 625

    def __post_init__(self):
        for name in ("max_extent", "max_statements", "max_expr_depth", "min_declarations",
                     "max_declarations", "max_intermediate_cells"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.max_rank < 0 or self.max_intermediate_rank < self.max_rank:
            raise ValueError("need 0 <= max_rank <= max_intermediate_rank")
        if self.min_declarations > self.max_declarations:
            raise ValueError("min_declarations > max_declarations")
        probs = (*self.qualifier_probabilities, self.division_probability,
                 self.undefined_probability, self.zero_probability)
        if any(not 0.0 <= q <= 1.0 for q in probs) or sum(self.qualifier_probabilities) > 1.0:
            raise ValueError("probabilities must lie in [0, 1]")


def _right(e: Expr) -> Expr:
    # a compound right operand of an infix operator needs brackets
    return e if isinstance(e, (Var, Paren)) else Paren(e)


class _ProgramGen:
    def __init__(self, cfg: GenConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)

    # -- declarations -------------------------------------------------------

    def declarations(self) -> list[Declaration]:
        cfg, rng = self.cfg, self.rng
        pool = rng.sample(range(1, cfg.max_extent + 1), k=min(cfg.max_extent, rng.randint(1, 3)))
        decls = []
        p_in, p_out = cfg.qualifier_probabilities
        for k in range(rng.randint(cfg.min_declarations, cfg.max_declarations)):
            if decls and rng.random() < 0.3:
                shape = rng.choice(decls).shape
            else:
                shape = tuple(rng.choice(pool) for _ in range(rng.randint(0, cfg.max_rank)))
            u = rng.random()
            qual = Qualifier.INPUT if u < p_in else Qualifier.OUTPUT if u < p_in + p_out else Qualifier.NONE
            decls.append(Declaration(_NAMES[k], shape, qual))
        return decls

    # -- realizable types ---------------------------------------------------

    def close_types(self, decls: list[Declaration]) -> None:
        cfg = self.cfg
        self.vars_of: dict[TensorType, list[str]] = {}
        for d in decls:
            self.vars_of.setdefault(d.shape, []).append(d.name)
        witness: dict[TensorType, Expr] = {t: Var(names[0]) for t, names in self.vars_of.items()}

        def ok(t):
            return len(t) <= cfg.max_intermediate_rank and size(t) <= cfg.max_intermediate_cells

        for _ in range(2):
            found: dict[TensorType, Expr] = {}
            current = list(witness.items())
            for t, w in current:
                for m in range(1, len(t) + 1):
                    for n in range(m + 1, len(t) + 1):
                        s = swap(t, m, n)
                        found.setdefault(s, Transpose(w, IndexPair(m, n)))
                        if t[m - 1] == t[n - 1]:
                            found.setdefault(delete_pair(t, m, n), Contract(w, IndexPair(m, n)))
                for t1, w1 in current:
                    if ok(t + t1):
                        found.setdefault(t + t1, OuterProduct(w, _right(w1)))
            for t, w in found.items():
                if ok(t) and t not in witness:
                    witness[t] = w
            if len(witness) > 400:
                break
        self.witness = witness
        self.contract_sources: dict[TensorType, list[tuple[TensorType, int, int]]] = {}
        for s in witness:
            for m in range(1, len(s) + 1):
                for n in range(m + 1, len(s) + 1):
                    if s[m - 1] == s[n - 1]:
                        self.contract_sources.setdefault(delete_pair(s, m, n), []).append((s, m, n))

    # -- expressions --------------------------------------------------------

    def leaf(self, t: TensorType, prefer: str | None = None) -> Expr:
        names = self.vars_of.get(t)
        if names:
            if prefer in names and self.rng.random() < 0.5:
                return Var(prefer)
            return Var(self.rng.choice(names))
        return self.witness[t]

    def expr(self, t: TensorType, depth: int, prefer: str | None = None) -> Expr:
        rng, cfg = self.rng, self.cfg
        if depth <= 0 or rng.random() < 0.2:
            return self.leaf(t, prefer)
        options: list[tuple[str, float]] = [("leaf", 1.5), ("elem", 2.0), ("paren", 0.3)]
        scalar_ok = () in self.witness
        if scalar_ok:
            options.append(("smul", 1.0))
            options.append(("sdiv", 3.0 * cfg.division_probability))
        splits = [k for k in range(len(t) + 1) if t[:k] in self.witness and t[k:] in self.witness]
        if splits:
            options.append(("outer", 1.5))
        swaps = [(m, n) for m in range(1, len(t) + 1) for n in range(m + 1, len(t) + 1)
                 if swap(t, m, n) in self.witness]
        if swaps:
            options.append(("trans", 1.0))
        sources = self.contract_sources.get(t, [])
        if sources:
            options.append(("contr", 2.0))
        kinds, weights = zip(*options)
        kind = rng.choices(kinds, weights)[0]
        d = depth - 1
        if kind == "leaf":
            return self.leaf(t, prefer)
        if kind == "paren":
            return Paren(self.expr(t, d, prefer))
        if kind == "elem":
            op = "/" if rng.random() < cfg.division_probability else rng.choice("+-*")
            return Elem(op, self.expr(t, d, prefer), _right(self.expr(t, d, prefer)))
        if kind == "smul":
            return Elem("*", self.expr((), d), _right(self.expr(t, d, prefer)))
        if kind == "sdiv":
            return Elem("/", self.expr(t, d, prefer), _right(self.expr((), d)))
        if kind == "outer":
            k = rng.choice(splits)
            return OuterProduct(self.expr(t[:k], d), _right(self.expr(t[k:], d)))
        if kind == "trans":
            m, n = rng.choice(swaps)
            if rng.random() < 0.3:
                m, n = n, m
            return Transpose(self.expr(swap(t, min(m, n), max(m, n)), d, prefer), IndexPair(m, n))
        s, m, n = rng.choice(sources)
        # same-tensor contraction (trace shape) when a variable has the source type
        if s in self.vars_of and rng.random() < 0.5:
            operand: Expr = self.leaf(s, prefer)
        else:
            operand = self.expr(s, d, prefer)
        if rng.random() < 0.3:
            m, n = n, m
        return Contract(operand, IndexPair(m, n))

    def statement(self, decls: list[Declaration]) -> Statement:
        rng = self.rng
        target = rng.choice(decls)
        t = target.shape
        symmetric = [(m, n) for m in range(1, len(t) + 1) for n in range(m + 1, len(t) + 1)
                     if t[m - 1] == t[n - 1]]
        if symmetric and rng.random() < 0.2:
            m, n = rng.choice(symmetric)
            return Statement(target.name, Transpose(Var(target.name), IndexPair(m, n)))
        return Statement(target.name, self.expr(t, self.cfg.max_expr_depth, prefer=target.name))

    def program(self) -> Program:
        decls = self.declarations()
        self.close_types(decls)
        n = self.rng.randint(1, self.cfg.max_statements)
        return Program(tuple(decls), tuple(self.statement(decls) for _ in range(n)))


def gen_program(cfg: GenConfig) -> Program:
    """A well-formed program, deterministic in ``cfg.seed``."""
    return _ProgramGen(cfg).program()


def gen_typed_exprs(cfg: GenConfig, count: int = 5) -> tuple[StaticContext, list[tuple[Expr, TensorType]]]:
    """A context and ``count`` well-typed expressions paired with their types."""
    gen = _ProgramGen(cfg)
    decls = gen.declarations()
    gen.close_types(decls)
    types = sorted(gen.witness, key=lambda t: (len(t), t))
    exprs = []
    for _ in range(count):
        t = gen.rng.choice(types)
        exprs.append((gen.expr(t, cfg.max_expr_depth), t))
    return build_context(decls), exprs


def random_value(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def gen_init(ctx: StaticContext, seed: int, cfg: GenConfig = GenConfig()) -> dict[str, list[Value]]:
    """Initial values for every declared tensor; input tensors are fully defined.

    Non-input tensors get undefined cells with ``cfg.undefined_probability`` and
    are occasionally left out altogether (entirely undefined). Zeros are
    over-represented so that division by zero is exercised.
    """
    rng = random.Random(f"init:{seed}")
    init = {}
    for name, t in ctx.items():
        is_input = ctx.qualifier(name) is Qualifier.INPUT
        if not is_input and rng.random() < 0.05:
            continue
        values: list[Value] = []
        for _ in range(size(t)):
            u = rng.random()
            if not is_input and u < cfg.undefined_probability:
                values.append(UNDEF)
            elif u < cfg.undefined_probability + cfg.zero_probability:
                values.append(ZERO)
            else:
                values.append(random_value(rng))
        init[name] = values
    return init
