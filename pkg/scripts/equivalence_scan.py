"""Scan the three moment envelopes and the 1980-style bound over a (p, q) grid.

Writes one CSV row per cell and prints the extreme ratios.
"""

import argparse
import json

from martbounds.cli import DEFAULT_P_GRID, DEFAULT_Q_POINTS, _csv, scan_equivalence, scan_minimality


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="equivalence.csv")
    ap.add_argument("--q-points", type=int, default=DEFAULT_Q_POINTS)
    args = ap.parse_args()
    rows, summary = scan_equivalence(DEFAULT_P_GRID, q_points=args.q_points)
    with open(args.out, "w") as fh:
        fh.write(_csv(rows))
    _, minimality = scan_minimality(DEFAULT_P_GRID)
    print(json.dumps({"equivalence": summary, "minimality": minimality}, indent=2))


if __name__ == "__main__":
    main()
