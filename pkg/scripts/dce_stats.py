"""How much dead code elimination removes, and how often uses are flagged.

    python scripts/dce_stats.py --programs 500
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
from dataclasses import replace

from tensorlang.analysis import analyze
from tensorlang.harness import GenConfig, gen_program
from tensorlang.syntax import Declaration, Program, Qualifier


def with_outputs(p: Program, rng: random.Random, rate: float) -> Program:
    decls = tuple(d if d.qualifier is Qualifier.INPUT else
                  Declaration(d.name, d.shape,
                              Qualifier.OUTPUT if rng.random() < rate else Qualifier.NONE)
                  for d in p.declarations)
    return Program(decls, p.statements)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--programs", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--output-rate", type=float, nargs="+", default=[0.0, 0.2, 0.5, 1.0])
    args = ap.parse_args(argv)

    cfg = GenConfig(seed=args.seed)
    for rate in args.output_rate:
        rng = random.Random(f"outputs:{args.seed}:{rate}")
        dead_share, flagged = [], 0
        for k in range(args.programs):
            p = with_outputs(gen_program(replace(cfg, seed=args.seed + k)), rng, rate)
            report = analyze(p)
            dead_share.append(len(report.dead_statements) / len(p.statements))
            flagged += bool(report.uninitialized_uses)
        print(f"output_rate={rate} programs={args.programs} "
              f"mean_dead_fraction={statistics.mean(dead_share):.3f} "
              f"programs_with_uninit_warnings={flagged}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
