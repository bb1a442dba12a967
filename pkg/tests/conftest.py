from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from tensorlang.evaluate import UNDEF
from tensorlang.harness import GenConfig, gen_program

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FAILURE_FIXTURES = {
    "fail_redeclaration.tl": "Redeclaration",
    "fail_assign_undeclared.tl": "AssignToUndeclared",
    "fail_assign_mismatch.tl": "AssignTypeMismatch",
    "fail_use_undeclared.tl": "UseOfUndeclared",
    "fail_expr_mismatch.tl": "ExprTypeMismatch",
}


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def matrix(rows):
    """Row-major flat list of Fractions from a nested list."""
    return [Fraction(x) for row in rows for x in row]


values = st.one_of(
    st.just(UNDEF),
    st.fractions(min_value=-5, max_value=5, max_denominator=4),
)

seeds = st.integers(min_value=0, max_value=2**32)


@st.composite
def programs(draw, **overrides):
    cfg = GenConfig(seed=draw(seeds), **overrides)
    return gen_program(cfg)
