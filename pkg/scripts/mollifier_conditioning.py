#!/usr/bin/env python3
"""Condition numbers, construction times and moment residuals of the A_q mollifiers.

    python scripts/mollifier_conditioning.py [--radius 1.0] [--csv out.csv]
"""

import argparse
import csv
import sys
import time

from colombeau_lab import testobjects as to


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--csv", default="")
    args = ap.parse_args()

    rows = []
    for q in range(to.MAX_Q + 1):
        t0 = time.perf_counter()
        phi = to.make_Aq(q, args.radius)
        dt = time.perf_counter() - t0
        rep = to.verify_moments(phi, to.MomentProfile(q))
        worst = max(rep.residuals.values())
        half = to.half_moment(phi)
        rows.append((q, to.hankel_condition(q), worst, half, to.l2_inner(phi) * args.radius, dt))

    header = ("q", "hankel_condition", "max_moment_residual", "half_moment", "l2_times_radius", "seconds")
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([r[0]] + [f"{v:.6g}" for v in r[1:]])
    if args.csv:
        out.close()


if __name__ == "__main__":
    main()
