from fractions import Fraction

from hypothesis import given, settings

from conftest import fixture_text, programs
from tensorlang.analysis import (
    InitialStore, StatementIndex, analyze, dead_code_eliminate, live_statements,
    reaching_definitions, uninitialized_uses,
)
from tensorlang.evaluate import UNDEF, run
from tensorlang.harness import GenConfig, gen_init, gen_program
from tensorlang.index import enumerate_indices
from tensorlang.padded import run_padded
from tensorlang.syntax import Qualifier, parse_program
from tensorlang.typecheck import check_program


def P(src):
    return parse_program(src)


def test_reaching_definitions_examples():
    r = reaching_definitions(P("var x : [] var y : [] var z : [] x = y z = x"))
    assert r[2, "x"] == StatementIndex(1, "x")
    assert r[1, "y"] == InitialStore("y")
    r = reaching_definitions(P("var x : [] var z : [] z = x"))
    assert r[1, "x"] == InitialStore("x")
    r = reaching_definitions(P("var x : [] x = x + x"))
    assert r == {(1, "x"): InitialStore("x")}


def test_uninitialized_examples():
    assert uninitialized_uses(P("var input a : [2] var b : [2] b = a")) == []
    (finding,) = uninitialized_uses(P("var a : [2] var b : [2] b = a"))
    assert (finding.statement, finding.name) == (1, "a")
    assert uninitialized_uses(P("var input a : [] var b : [] var c : [] b = a c = b")) == []


def test_uninitialized_is_transitive():
    found = uninitialized_uses(P("var a : [] var b : [] var c : [] b = a c = b"))
    assert [(f.statement, f.name) for f in found] == [(1, "a"), (2, "b")]


def test_dce_examples():
    p = P("var output o : [] var t : [] t = o o = o")
    assert dead_code_eliminate(p).statements == p.statements[1:]
    p = P("var a : [] var x : [] var output o : [] x = a o = x")
    assert dead_code_eliminate(p) == p
    p = P("var a : [] var b : [] var output o : [] o = a o = b")
    assert dead_code_eliminate(p).statements == p.statements[1:]
    init = {"a": [Fraction(1)], "b": [Fraction(2)]}
    assert run(p, init).cells["o", ()] == run(dead_code_eliminate(p), init).cells["o", ()] == 2


def test_no_outputs_means_everything_live():
    for name in ("contraction.tl", "trace.tl", "transposition.tl"):
        p = P(fixture_text(name))
        assert dead_code_eliminate(p) == p
    p = P("var a : [] var b : [] var o : [] o = a o = b")
    assert dead_code_eliminate(p) == p


def test_report_lines():
    p = P("var a : [] var b : [] var output o : [] b = a o = a")
    assert analyze(p).lines() == ["WARN uninit 1 a", "WARN uninit 2 a", "INFO dead 1"]


def _outputs(p):
    return [d for d in p.declarations if d.qualifier is Qualifier.OUTPUT]


@settings(max_examples=150)
@given(programs())
def test_dce_sound_and_idempotent(p):
    ctx = check_program(p)
    q = dead_code_eliminate(p)
    assert dead_code_eliminate(q) == q
    check_program(q)
    assert q.declarations == p.declarations
    init = gen_init(ctx, 1, GenConfig())
    for evaluate in (lambda prog: run(prog, init),
                     lambda prog: run_padded(prog, init, 1),
                     lambda prog: run_padded(prog, init, 4)):
        before, after = evaluate(p), evaluate(q)
        for d in _outputs(p):
            for i in enumerate_indices(ctx[d.name]):
                assert before.cells[d.name, i] == after.cells[d.name, i]


@settings(max_examples=150)
@given(programs())
def test_dead_set_never_feeds_output(p):
    dead = analyze(p).dead_statements
    assert dead.isdisjoint(live_statements(p))
    assert dead | live_statements(p) == set(range(1, len(p.statements) + 1))


@settings(max_examples=150)
@given(programs())
def test_own_lhs_never_reaches_own_rhs(p):
    for (k, name), site in reaching_definitions(p).items():
        assert not (isinstance(site, StatementIndex) and site.index >= k)


def test_clean_programs_have_defined_outputs():
    # division-free, since x/0 is undefined regardless of initialization
    cfg = GenConfig(division_probability=0.0)
    clean = 0
    for seed in range(600):
        p = gen_program(GenConfig(seed=seed, division_probability=0.0))
        if uninitialized_uses(p):
            continue
        clean += 1
        ctx = check_program(p)
        init = {name: vals for name, vals in gen_init(ctx, seed, cfg).items()
                if ctx.qualifier(name) is Qualifier.INPUT}
        out = run(p, init)
        assigned = {s.lhs for s in p.statements}
        for d in _outputs(p):
            if d.name in assigned:
                assert all(out.cells[d.name, i] is not UNDEF
                           for i in enumerate_indices(ctx[d.name])), (seed, d.name)
    assert clean >= 30
