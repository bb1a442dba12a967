from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import matrix, programs
from tensorlang.evaluate import UNDEF, Mode, run
from tensorlang.harness import (
    DiffReport, GenConfig, check_simulation, gen_init, gen_program, oracle_eval, shrink,
)
from tensorlang.harness.difftest import _failure_predicate, compare_program
from tensorlang.index import enumerate_indices
from tensorlang.syntax import Contract, Elem, OuterProduct, Qualifier, Transpose, parse_program
from tensorlang.typecheck import check_program


def test_gen_deterministic():
    assert gen_program(GenConfig(seed=1)) == gen_program(GenConfig(seed=1))
    ctx = check_program(gen_program(GenConfig(seed=1)))
    assert gen_init(ctx, 1) == gen_init(ctx, 1)


def test_generated_programs_type_check():
    shapes = Counter()
    for seed in range(1000):
        p = gen_program(GenConfig(seed=seed))
        check_program(p)
        assert 2 <= len(p.declarations) <= 6
        assert 1 <= len(p.statements) <= 6
        for d in p.declarations:
            assert len(d.shape) <= 3 and all(1 <= e <= 5 for e in d.shape)
            shapes[len(d.shape)] += 1
    assert set(shapes) == {0, 1, 2, 3}


def _nodes(e):
    yield e
    for attr in ("inner", "left", "right", "operand"):
        child = getattr(e, attr, None)
        if child is not None:
            yield from _nodes(child)


def test_generator_covers_all_forms():
    seen = Counter()
    trace_like = self_transpose = 0
    for seed in range(300):
        for s in gen_program(GenConfig(seed=seed)).statements:
            for e in _nodes(s.rhs):
                seen[type(e).__name__] += 1
                if isinstance(e, Elem):
                    seen[e.op] += 1
                if isinstance(e, Contract) and not isinstance(e.operand, OuterProduct):
                    trace_like += 1
            if isinstance(s.rhs, Transpose) and getattr(s.rhs.operand, "name", None) == s.lhs:
                self_transpose += 1
    for form in ("Var", "Paren", "Elem", "OuterProduct", "Contract", "Transpose", "+", "-", "*", "/"):
        assert seen[form] > 0, form
    assert trace_like > 0 and self_transpose > 0


def test_scalar_only_config():
    for seed in range(50):
        p = gen_program(GenConfig(seed=seed, max_rank=0))
        ctx = check_program(p)
        assert all(t == () for _, t in ctx.items())
        ctx_init = gen_init(ctx, seed)
        assert all(len(v) == 1 for v in ctx_init.values())


def test_gen_init_inputs_defined():
    for seed in range(200):
        ctx = check_program(gen_program(GenConfig(seed=seed)))
        init = gen_init(ctx, seed)
        for name in ctx.with_names(Qualifier.INPUT):
            assert UNDEF not in init[name]
        for vals in init.values():
            for v in vals:
                assert v is UNDEF or (abs(v.numerator) <= 9 and 1 <= v.denominator <= 9)


def test_gen_config_validation():
    with pytest.raises(ValueError):
        GenConfig(max_extent=0)
    with pytest.raises(ValueError):
        GenConfig(division_probability=1.5)
    with pytest.raises(ValueError):
        GenConfig(min_declarations=4, max_declarations=3)


def test_oracle_examples():
    p = parse_program("var A : [2 2] var B : [2 2] var C : [2 2] C = (A # B) . [2 3]")
    a = matrix([[1, 2], [3, 4]])
    out = oracle_eval(p, {"A": a, "B": matrix([[5, 6], [7, 8]])})
    assert [out.cells["C", i] for i in enumerate_indices((2, 2))] == matrix([[19, 22], [43, 50]])
    # trace of A A^T is the sum of squares
    p = parse_program("var A : [2 2] var B : [2 2] var s : [] s = ((A # B) . [2 3]) . [1 2]")
    out = oracle_eval(p, {"A": a, "B": matrix([[1, 3], [2, 4]])})
    assert out.cells["s", ()] == 1 + 4 + 9 + 16 == 30
    p = parse_program("var x : [2] x = x")
    assert oracle_eval(p, {"x": [Fraction(1), UNDEF]}).cells == {
        ("x", (1,)): 1, ("x", (2,)): UNDEF}


@settings(max_examples=100)
@given(programs())
def test_oracle_matches_evaluator(p):
    init = gen_init(check_program(p), 2)
    for mode in Mode:
        assert oracle_eval(p, init, mode) == run(p, init, mode)


def test_diff_report_passed():
    assert DiffReport(programs_run=3).passed
    r = check_simulation(GenConfig(seed=0), seeds=20, mode=Mode.ANNIHILATING)
    assert r.passed and r.programs_run == 20
    assert r.lines()[-1].startswith("PASS programs=20 ")


def test_parallel_matches_serial():
    a = check_simulation(GenConfig(seed=40), seeds=12, shrink_failures=False)
    b = check_simulation(GenConfig(seed=40), seeds=12, jobs=2, shrink_failures=False)
    assert [m.line() for m in a.mismatches] == [m.line() for m in b.mismatches]


def test_m1_domain_matches_reference():
    r = check_simulation(GenConfig(seed=0), Ms=[1], seeds=50)
    assert r.passed


def test_mutation_is_detected():
    r = check_simulation(GenConfig(seed=0), seeds=20, mode=Mode.ANNIHILATING,
                         mutate="skip-zero-fill", shrink_failures=False)
    assert not r.passed
    assert {m.kind for m in r.mismatches} >= {"padding"}
    with pytest.raises(ValueError):
        check_simulation(GenConfig(), seeds=1, mutate="nope")


def test_shrink_produces_smaller_reproducer():
    pred = _failure_predicate("padding", 4, Mode.ANNIHILATING, "skip-zero-fill")
    for seed in range(50):
        p = gen_program(GenConfig(seed=seed))
        init = gen_init(check_program(p), seed)
        if len(p.statements) >= 2 and pred(p, init):
            break
    small, small_init = shrink(p, init, pred)
    assert pred(small, small_init)
    size = lambda q: (len(q.statements), len(q.declarations),
                      sum(sum(d.shape) for d in q.declarations))
    assert size(small) < size(p)
    check_program(small)


def test_padding_failures_come_from_zero_times_undefined():
    # Under the specified arithmetic the only disagreements are padding cells
    # holding UNDEF; logical cells and the oracle always agree.
    r = check_simulation(GenConfig(seed=0), seeds=100, shrink_failures=False)
    assert {m.kind for m in r.mismatches} <= {"padding"}
    assert all(m.got is UNDEF for m in r.mismatches)
    assert not r.traps


def test_compare_program_reports_trap_for_bad_program():
    p = parse_program("var a : [2] var b : [3] a = b")
    r = compare_program(p, {}, [1])
    assert [t.kind for t in r.traps] == ["generator"]
