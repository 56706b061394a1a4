"""Run every exit criterion and print one verdict line each.

Usage: python scripts/run_acceptance.py [name-substring ...]
Exit status is the number of failing criteria.
"""

import argparse
import sys

from ltcnd.experiments import ALL_CHECKS


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("only", nargs="*", help="run checks whose function name contains one of these")
    args = p.parse_args()
    failed = 0
    for check in ALL_CHECKS:
        if args.only and not any(key in check.__name__ for key in args.only):
            continue
        result = check()
        print(result.line(), flush=True)
        failed += not result.passed
    return failed


if __name__ == "__main__":
    sys.exit(main())
