"""Run the full invariant suite and print a margin table.

A "certificate" here is the verification report: every invariant of the
packing construction evaluated over seeded sample pools, with the worst
margin observed for each.  Positive margins certify the run.
"""

import argparse
import sys

from relpack import make_params, run_all
from relpack.verify import SampleSpec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--r", type=float, default=0.8)
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--json", default=None, help="also write the raw report")
    args = ap.parse_args(argv)

    params = make_params(args.n, args.r)
    print("packing  n=%d  r=%g  c=%.6f  epsilon=%.6g" %
          (params.n, params.r, params.c, params.epsilon))
    print("budget   n*c + r^2/2 + n*eps = %.17f" %
          (params.n * params.c + params.r**2 / 2 + params.n * params.epsilon))

    report = run_all(params, SampleSpec("uniform-ball", args.samples, args.seed))
    print()
    print("%-22s %-6s %14s %12s %9s" %
          ("check", "status", "worst_margin", "tolerance", "samples"))
    for c in report.checks:
        print("%-22s %-6s %14.6e %12.3e %9d" %
              (c.name, "pass" if c.passed else "FAIL",
               c.worst_margin, c.tolerance, c.samples_used))
    print()
    print("overall:", "PASS" if report.overall else "FAIL")

    if args.json:
        report.save(args.json)
        print("report ->", args.json)
    return 0 if report.overall else 1


if __name__ == "__main__":
    raise SystemExit(main())
