"""Whole-tensor dataflow over straight-line tensor programs.

There is no control flow, so the reaching definition of a use is simply the
last earlier assignment to the same variable. Statements are numbered from 1.
A statement's own assignment never reaches its right-hand side: every element
of the right-hand side is computed from the store before the statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from tensorlang.syntax import Program, Qualifier, variables


@dataclass(frozen=True)
class InitialStore:
    name: str


@dataclass(frozen=True)
class StatementIndex:
    index: int
    name: str


DefSite = Union[InitialStore, StatementIndex]


@dataclass(frozen=True)
class UninitializedUse:
    statement: int
    name: str
    reason: str


@dataclass
class AnalysisReport:
    uninitialized_uses: list[UninitializedUse] = field(default_factory=list)
    dead_statements: set[int] = field(default_factory=set)

    def lines(self) -> list[str]:
        out = [f"WARN uninit {u.statement} {u.name}" for u in self.uninitialized_uses]
        out += [f"INFO dead {k}" for k in sorted(self.dead_statements)]
        return out


def reaching_definitions(p: Program) -> dict[tuple[int, str], DefSite]:
    last: dict[str, DefSite] = {}
    reach: dict[tuple[int, str], DefSite] = {}
    for k, s in enumerate(p.statements, start=1):
        for name in variables(s.rhs):
            reach[k, name] = last.get(name, InitialStore(name))
        last[s.lhs] = StatementIndex(k, s.lhs)
    return reach


def uninitialized_uses(p: Program) -> list[UninitializedUse]:
    """Uses that may observe uninitialized memory.

    Only input variables are initialized on entry. A statement that reads a
    possibly-uninitialized value taints its target for later readers.
    """
    inputs = {d.name for d in p.declarations if d.qualifier is Qualifier.INPUT}
    reach = reaching_definitions(p)
    tainted: set[int] = set()
    findings = []
    for k, s in enumerate(p.statements, start=1):
        seen = set()
        for name in variables(s.rhs):
            if name in seen:
                continue
            seen.add(name)
            site = reach[k, name]
            if isinstance(site, InitialStore):
                if name not in inputs:
                    findings.append(UninitializedUse(k, name, "initial value is not an input"))
                    tainted.add(k)
            elif site.index in tainted:
                findings.append(UninitializedUse(k, name, f"defined by statement {site.index} "
                                                          "from uninitialized values"))
                tainted.add(k)
    return findings


def live_statements(p: Program) -> set[int]:
    outputs = {d.name for d in p.declarations if d.qualifier is Qualifier.OUTPUT}
    if not outputs:
        # no declared interface: keep everything, overwritten values included
        return set(range(1, len(p.statements) + 1))
    live = set(outputs)
    keep = set()
    for k in range(len(p.statements), 0, -1):
        s = p.statements[k - 1]
        if s.lhs in live:
            keep.add(k)
            live.discard(s.lhs)
            live.update(variables(s.rhs))
    return keep


def dead_code_eliminate(p: Program) -> Program:
    keep = live_statements(p)
    return Program(p.declarations,
                   tuple(s for k, s in enumerate(p.statements, start=1) if k in keep))


def analyze(p: Program) -> AnalysisReport:
    live = live_statements(p)
    dead = set(range(1, len(p.statements) + 1)) - live
    return AnalysisReport(uninitialized_uses(p), dead)
