"""Run every acceptance criterion and print one line per criterion (plus claim details with -v)."""
import argparse
import sys

from kdist.reproduce import DEFAULT_SEED, format_outcome, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--suite", default="all")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    outcomes = run_suite(args.suite, args.seed, args.jobs)
    for o in outcomes:
        print("\n".join(format_outcome(o, args.verbose)))
    passed = sum(o.passed for o in outcomes)
    print(f"{passed}/{len(outcomes)} criteria passed")
    return 0 if passed == len(outcomes) else 1


if __name__ == "__main__":
    sys.exit(main())
