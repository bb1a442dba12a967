"""Differential checks of the evaluators over generated programs.

For each seed we generate a program and an initial store, then compare

* the element-wise evaluator against the naive oracle (exact equality),
* the padded evaluator, for each vector length, against the reference on the
  logical cells, and require every padding cell to be exactly zero,
* store domains before and after (progress), with out-of-domain accesses
  trapped (safety).

Failures are data: they are collected in a :class:`DiffReport`. The first
failure of each kind can be shrunk to a smaller program that still fails.
"""

from __future__ import annotations

import contextlib
import signal
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from tensorlang.evaluate import (
    ZERO, AccessViolation, Mode, Value, format_value, init_store, run,
)
from tensorlang.harness.gen import GenConfig, gen_init, gen_program
from tensorlang.harness.oracle import oracle_eval
from tensorlang.index import enumerate_indices, padding_indices
from tensorlang.padded import init_padded_store, padded_run
from tensorlang.syntax import Declaration, Program, pretty_print, variables
from tensorlang.typecheck import StaticContext, TypeCheckError, check_program

MUTATIONS = ("skip-zero-fill",)
# per (seed, M, kind) cap on recorded cell mismatches
_MAX_CELLS = 3


@dataclass
class Mismatch:
    seed: int
    M: int | None
    kind: str  # oracle | logical | padding | domain
    name: str
    index: tuple[int, ...]
    expected: Value | None
    got: Value | None
    program: str
    init: str

    def line(self) -> str:
        m = "-" if self.M is None else self.M
        exp = "-" if self.expected is None else format_value(self.expected)
        got = "-" if self.got is None else format_value(self.got)
        idx = " ".join(map(str, self.index))
        return (f"MISMATCH kind={self.kind} seed={self.seed} M={m} var={self.name} index=[{idx}] "
                f"expected={exp} got={got} program=\"{self.program}\" init=\"{self.init}\"")


@dataclass
class Trap:
    seed: int
    M: int | None
    kind: str  # access | timeout | generator
    detail: str
    program: str

    def line(self) -> str:
        m = "-" if self.M is None else self.M
        return f"TRAP kind={self.kind} seed={self.seed} M={m} detail=\"{self.detail}\" program=\"{self.program}\""


@dataclass
class DiffReport:
    programs_run: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)
    traps: list[Trap] = field(default_factory=list)
    reproducers: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.mismatches and not self.traps

    def merge(self, other: "DiffReport") -> None:
        self.programs_run += other.programs_run
        self.mismatches.extend(other.mismatches)
        self.traps.extend(other.traps)
        self.reproducers.extend(other.reproducers)

    def failing_seeds(self, kind: str | None = None) -> set[int]:
        seeds = {m.seed for m in self.mismatches if kind is None or m.kind == kind}
        if kind is None:
            seeds |= {t.seed for t in self.traps}
        return seeds

    def lines(self) -> list[str]:
        out = [m.line() for m in self.mismatches] + [t.line() for t in self.traps]
        out += self.reproducers
        status = "PASS" if self.passed else "FAIL"
        out.append(f"{status} programs={self.programs_run} mismatches={len(self.mismatches)} "
                   f"traps={len(self.traps)} seconds={self.seconds:.1f}")
        return out


def one_line(p: Program) -> str:
    return " ".join(line for line in pretty_print(p).splitlines() if line)


def init_line(init) -> str:
    return " ".join(f"{name}=[{' '.join(format_value(v) for v in vals)}]" for name, vals in init.items())


class _Timeout(Exception):
    pass


@contextlib.contextmanager
def _deadline(seconds: float | None) -> Iterator[None]:
    usable = (seconds and hasattr(signal, "setitimer")
              and threading.current_thread() is threading.main_thread())
    if not usable:
        yield
        return

    def fire(signum, frame):
        raise _Timeout()

    old = signal.signal(signal.SIGALRM, fire)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


# --------------------------------------------------------------------------- #
# Comparisons

def compare_program(p: Program, init, Ms: Sequence[int], seed: int = -1,
                    mode: Mode = Mode.CONTROLLED, mutate: str | None = None,
                    with_oracle: bool = True) -> DiffReport:
    """Run every check on one (program, init) pair."""
    report = DiffReport(programs_run=1)
    text, itext = one_line(p), init_line(init)

    def mismatch(M, kind, name, index, expected, got):
        report.mismatches.append(Mismatch(seed, M, kind, name, index, expected, got, text, itext))

    def trap(M, kind, detail):
        report.traps.append(Trap(seed, M, kind, detail, text))

    try:
        ctx = check_program(p)
    except TypeCheckError as e:
        trap(None, "generator", str(e))
        return report

    try:
        ref = run(p, init, mode, armed=True)
    except AccessViolation as e:
        trap(None, "access", str(e))
        return report
    if ref.domain() != init_store(ctx, init).domain():
        mismatch(None, "domain", "*", (), None, None)

    if with_oracle:
        orc = oracle_eval(p, init, mode)
        count = 0
        for key, v in ref.cells.items():
            if orc.cells.get(key, None) != v and count < _MAX_CELLS:
                count += 1
                mismatch(None, "oracle", key[0], key[1], orc.cells.get(key), v)
        if orc.domain() != ref.domain():
            mismatch(None, "domain", "oracle", (), None, None)

    for M in Ms:
        try:
            pr = padded_run(p, init, M, mode, armed=True, zero_fill=(mutate != "skip-zero-fill"))
        except AccessViolation as e:
            trap(M, "access", str(e))
            continue
        if pr.store.domain() != init_padded_store(ctx, init, M).domain():
            mismatch(M, "domain", "*", (), None, None)
        logical = padding = 0
        for name, t in ctx.items():
            for i in enumerate_indices(t):
                want, got = ref.cells[name, i], pr.store.cells[name, i]
                if want != got and logical < _MAX_CELLS:
                    logical += 1
                    mismatch(M, "logical", name, i, want, got)
            for i in padding_indices(t, M):
                got = pr.store.cells[name, i]
                if not _is_zero(got) and padding < _MAX_CELLS:
                    padding += 1
                    mismatch(M, "padding", name, i, ZERO, got)
    return report


def _is_zero(v) -> bool:
    return isinstance(v, Fraction) and v == 0


def check_seed(cfg: GenConfig, seed: int, Ms: Sequence[int], mode: Mode = Mode.CONTROLLED,
               mutate: str | None = None, timeout: float | None = 60.0,
               with_oracle: bool = True) -> DiffReport:
    p = gen_program(replace(cfg, seed=seed))
    init = gen_init(check_program(p), seed, cfg)
    try:
        with _deadline(timeout):
            return compare_program(p, init, Ms, seed, mode, mutate, with_oracle)
    except _Timeout:
        report = DiffReport(programs_run=1)
        report.traps.append(Trap(seed, None, "timeout", f"exceeded {timeout}s", one_line(p)))
        return report


# --------------------------------------------------------------------------- #
# Shrinking

def _restrict(init, old: StaticContext, new_shapes: dict[str, tuple[int, ...]]):
    out = {}
    for name, vals in init.items():
        if name not in new_shapes:
            continue
        cells = dict(zip(enumerate_indices(old[name]), vals))
        out[name] = [cells[i] for i in enumerate_indices(new_shapes[name])]
    return out


def shrink(p: Program, init, still_fails: Callable[[Program, dict], bool],
           max_steps: int = 200) -> tuple[Program, dict]:
    """Greedy minimization: drop statements, drop unused tensors, lower extents.

    Lowering maps one extent value to a smaller one everywhere at once, which
    keeps every equality the type rules rely on.
    """
    steps = 0
    changed = True
    while changed and steps < max_steps:
        changed = False
        for k in reversed(range(len(p.statements))):
            cand = Program(p.declarations, p.statements[:k] + p.statements[k + 1:])
            steps += 1
            if still_fails(cand, init):
                p, changed = cand, True
        used = {s.lhs for s in p.statements} | {v for s in p.statements for v in variables(s.rhs)}
        for d in p.declarations:
            if d.name in used:
                continue
            cand = Program(tuple(x for x in p.declarations if x is not d), p.statements)
            cand_init = {k: v for k, v in init.items() if k != d.name}
            steps += 1
            if still_fails(cand, cand_init):
                p, init, changed = cand, cand_init, True
        extents = sorted({e for d in p.declarations for e in d.shape if e > 1}, reverse=True)
        for big in extents:
            for small in range(1, big):
                ctx = check_program(p)
                decls = tuple(Declaration(d.name, tuple(small if e == big else e for e in d.shape),
                                          d.qualifier) for d in p.declarations)
                cand = Program(decls, p.statements)
                try:
                    check_program(cand)
                except TypeCheckError:
                    continue
                cand_init = _restrict(init, ctx, {d.name: d.shape for d in decls})
                steps += 1
                if still_fails(cand, cand_init):
                    p, init, changed = cand, cand_init, True
                    break
    return p, init


def _failure_predicate(kind: str, M: int | None, mode: Mode, mutate: str | None):
    Ms = [] if M is None else [M]

    def fails(p, init) -> bool:
        try:
            r = compare_program(p, init, Ms, mode=mode, mutate=mutate, with_oracle=(kind == "oracle"))
        except Exception:
            return False
        return any(m.kind == kind for m in r.mismatches) or (kind == "trap" and bool(r.traps))

    return fails


def reproducer(cfg: GenConfig, seed: int, kind: str, M: int | None, mode: Mode,
               mutate: str | None) -> str:
    p = gen_program(replace(cfg, seed=seed))
    init = gen_init(check_program(p), seed, cfg)
    small, small_init = shrink(p, init, _failure_predicate(kind, M, mode, mutate))
    m = "-" if M is None else M
    return f"REPRO kind={kind} seed={seed} M={m} program=\"{one_line(small)}\" init=\"{init_line(small_init)}\""


# --------------------------------------------------------------------------- #
# Driver

def _check_chunk(args) -> DiffReport:
    cfg, seeds, Ms, mode, mutate, timeout = args
    report = DiffReport()
    for s in seeds:
        report.merge(check_seed(cfg, s, Ms, mode, mutate, timeout))
    return report


def check_simulation(cfg: GenConfig, Ms: Iterable[int] = (1, 2, 3, 4, 8), seeds: int = 1000,
                     mode: Mode = Mode.CONTROLLED, mutate: str | None = None, jobs: int = 1,
                     timeout: float | None = 60.0, shrink_failures: bool = True) -> DiffReport:
    """Check seeds ``cfg.seed .. cfg.seed + seeds - 1`` against every vector length in ``Ms``."""
    if mutate is not None and mutate not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutate!r}")
    Ms = sorted(set(Ms))
    start = time.perf_counter()
    all_seeds = list(range(cfg.seed, cfg.seed + seeds))
    report = DiffReport()
    if jobs <= 1:
        report.merge(_check_chunk((cfg, all_seeds, Ms, mode, mutate, timeout)))
    else:
        chunks = [all_seeds[k::jobs] for k in range(jobs)]
        with ProcessPoolExecutor(jobs) as pool:
            for part in pool.map(_check_chunk, [(cfg, c, Ms, mode, mutate, timeout) for c in chunks]):
                report.merge(part)
    report.mismatches.sort(key=lambda m: (m.seed, m.M or 0))
    report.traps.sort(key=lambda t: t.seed)
    if shrink_failures:
        done = set()
        for m in report.mismatches:
            if (m.kind, m.M) in done or m.kind == "domain":
                continue
            done.add((m.kind, m.M))
            report.reproducers.append(reproducer(cfg, m.seed, m.kind, m.M, mode, mutate))
    report.seconds = time.perf_counter() - start
    return report
