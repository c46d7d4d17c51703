#!/usr/bin/env python3
"""Run the acceptance criteria and print one PASS/FAIL line each.

    python3 scripts/run_acceptance.py            # all ten
    python3 scripts/run_acceptance.py 3 5 -v     # a subset, with every check listed
"""
import argparse
import sys

from whquant.acceptance import run_all

ap = argparse.ArgumentParser()
ap.add_argument("criteria", nargs="*", type=int)
ap.add_argument("-v", "--verbose", action="store_true")
args = ap.parse_args()

results = run_all(args.criteria or None)
for r in results:
    print(r.line())
    for c in r.checks:
        if args.verbose or not c.passed:
            print(f"    {'ok ' if c.passed else 'BAD'} {c.name}: {c.value:.3e} (tol {c.tol:.0e}) {c.note}")
sys.exit(0 if all(r.passed for r in results) else 1)
