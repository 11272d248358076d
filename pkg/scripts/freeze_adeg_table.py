"""Regenerate the stored adeg_{1/3}(OR_n) certificate table used by the acceptance tests."""
import argparse
from pathlib import Path

from kdist.reproduce import adeg_table_text

DEFAULT = Path(__file__).resolve().parent.parent / "tests" / "data" / "adeg_or_1_8.cert"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--out", type=Path, default=DEFAULT)
    args = ap.parse_args()
    text = adeg_table_text(args.max_n)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(text, encoding="utf-8")
    print(f"wrote {len(text.splitlines())} lines to {args.out}")


if __name__ == "__main__":
    main()
