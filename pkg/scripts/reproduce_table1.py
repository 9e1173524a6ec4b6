"""Print the GCC reserve and MSEP table for the bundled data.

Usage: python scripts/reproduce_table1.py [--scale 1000] [--json PATH]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from gcc_reserving import load_wuthrich_merz
from gcc_reserving.datasets import WUTHRICH_MERZ_DISPLAY_SCALE
from gcc_reserving.report import build_report

LAMBDAS = (0.0, 0.25, 0.5, 0.55, 0.75, 1.0)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=WUTHRICH_MERZ_DISPLAY_SCALE)
    ap.add_argument("--json", type=Path, help="also write the full report here")
    args = ap.parse_args()

    tri, pi = load_wuthrich_merz()
    doc = build_report(tri, pi, LAMBDAS, scale=args.scale)
    print(doc.table(), end="")
    if args.json:
        args.json.write_text(doc.to_json())
        print(f"wrote {args.json}")


if __name__ == "__main__":
    main()
