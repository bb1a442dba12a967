"""Padded-versus-reference agreement across arithmetic modes and vector lengths.

For each mode and each M, counts generated programs whose padded run differs
from the reference on the logical region, and programs that leave a nonzero
(in practice: undefined) value in some padding cell.

    python scripts/simulation_sweep.py --seeds 1000
"""

from __future__ import annotations

import argparse
import csv
import sys

from tensorlang.evaluate import Mode
from tensorlang.harness import GenConfig, check_simulation


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=1000)
    ap.add_argument("--base-seed", type=int, default=0)
    ap.add_argument("--pad", default="1,2,3,4,8")
    ap.add_argument("--undefined-probability", type=float, default=0.1)
    ap.add_argument("--csv", help="also write the table here")
    args = ap.parse_args(argv)

    Ms = [int(m) for m in args.pad.split(",")]
    cfg = GenConfig(seed=args.base_seed, undefined_probability=args.undefined_probability)
    rows = []
    for mode in (Mode.CONTROLLED, Mode.ANNIHILATING):
        for M in Ms:
            r = check_simulation(cfg, [M], args.seeds, mode, shrink_failures=False)
            rows.append({
                "mode": mode.value, "M": M, "programs": r.programs_run,
                "logical_fail": len(r.failing_seeds("logical")),
                "padding_fail": len(r.failing_seeds("padding")),
                "oracle_fail": len(r.failing_seeds("oracle")),
                "traps": len(r.traps), "seconds": round(r.seconds, 1),
            })
            print(" ".join(f"{k}={v}" for k, v in rows[-1].items()), flush=True)
    if args.csv:
        with open(args.csv, "w", newline="") as f:
            w = csv.DictWriter(f, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
