"""Program generation and differential testing of the evaluators."""

from tensorlang.harness.difftest import DiffReport, check_simulation, shrink
from tensorlang.harness.gen import GenConfig, gen_init, gen_program, gen_typed_exprs
from tensorlang.harness.oracle import oracle_eval

__all__ = ["DiffReport", "GenConfig", "check_simulation", "gen_init", "gen_program",
           "gen_typed_exprs", "oracle_eval", "shrink"]
