#!/usr/bin/env python3
"""Run every experiment through the CLI and collect outputs in one directory.

    python scripts/run_experiments.py --out results/ [--quick]

Each experiment writes a JSON report (resolved config embedded) and, where
the subcommand has one, a CSV table.  A summary of exit codes is printed at
the end; the script's own exit code is the worst one seen.
"""

import argparse
import sys
import time
from pathlib import Path

from colombeau_lab.cli import main as cli

EXPERIMENTS = [
    ("mollifier_q4", ["mollifier", "--q", "4"], False),
    ("moments_q8", ["moments", "--q", "8", "--even"], False),
    ("embed_sin_q2", ["embed-check", "--f", "sin", "--q", "2"], False),
    ("embed_sin_q4", ["embed-check", "--f", "sin", "--q", "4"], False),
    ("embed_sin_q6", ["embed-check", "--f", "sin", "--q", "6"], False),
    ("embed_x3_q4", ["embed-check", "--f", "x^3", "--q", "4"], False),
    ("product_sin_cos_q4", ["product-check", "--f1", "sin", "--f2", "cos", "--q", "4"], False),
    ("moderate_delta", ["test-moderate", "--rep", "delta", "--K=-0.5,0.5"], True),
    ("moderate_sigma_sin", ["test-moderate", "--rep", "sigma:sin"], True),
    ("negligible_iota_sigma_sin", ["test-negligible", "--rep", "iota-sigma:sin", "--n", "3", "--q-range", "0..6"], True),
    ("landau_sin_q4_n3", ["demo-landau", "--rep", "iota-sigma:sin", "--q", "4", "--n", "3"], True),
]
EXPERIMENTS += [(f"P_decay_q{q}", ["counterexample", "P", "--q", str(q)], True) for q in range(1, 6)]
EXPERIMENTS += [
    (f"Q_decay_q{q}_{s}", ["counterexample", "Q", "--q", str(q), "--sigma", s], True)
    for q in range(1, 6)
    for s in ("bump", "smoothstep")
]
EXPERIMENTS += [("witness_q1", ["counterexample", "witness", "--q", "1"], True)]
EXPERIMENTS += [("witness_q2", ["counterexample", "witness", "--q", "2"], True)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", default="results", help="output directory")
    ap.add_argument("--quick", action="store_true", help="coarser grids (witness t-grid of 40 points)")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    worst = 0
    for name, argv, has_csv in EXPERIMENTS:
        argv = list(argv)
        if args.quick and "witness" in argv:
            argv += ["--t-grid", "0.001,1,40"]
        if argv[0] == "mollifier":
            argv += ["--out", str(out / f"{name}.json")]
        else:
            argv += ["--out", str(out / f"{name}.json")]
            if has_csv:
                argv += ["--csv", str(out / f"{name}.csv")]
        t0 = time.perf_counter()
        rc = cli(argv)
        worst = max(worst, rc)
        print(f"{name:32s} exit={rc} {time.perf_counter() - t0:7.2f}s")
    for which, target in (("dot", "diagram.dot"), ("list", "types.txt"), ("algebras", "algebras.txt")):
        cli(["classify", f"--{which}", "--out", str(out / target)])
    return worst


if __name__ == "__main__":
    sys.exit(main())
