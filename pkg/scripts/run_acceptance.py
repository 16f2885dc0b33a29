#!/usr/bin/env python3
"""Run the acceptance criteria and print one PASS/FAIL line each (plus a JSON report)."""

import argparse
import sys

from isoprofile import _io
from isoprofile.acceptance import SuiteConfig, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--criteria", type=int, nargs="*")
    ap.add_argument("--out", default="results/acceptance.json")
    args = ap.parse_args()
    report = run_suite(SuiteConfig(seed=args.seed, quick=args.quick), args.criteria)
    _io.write_text(args.out, _io.dumps_json(report))
    for r in report["criteria"]:
        print(f"criterion {r['id']:2d} {'PASS' if r['pass'] else 'FAIL'}  {r['name']}")
    return 0 if report["pass"] else 2


if __name__ == "__main__":
    sys.exit(main())
