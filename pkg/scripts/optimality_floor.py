"""Exact ``||f_n||_p / check_B`` for the tuned two-point construction across the scan grid.

Shows how close the constructed martingales come to the upper envelope, per p.
"""

import argparse

from martbounds.cli import DEFAULT_P_GRID, DEFAULT_Q_POINTS, FLOOR_N, _csv, scan_floor


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=FLOOR_N)
    ap.add_argument("--q-points", type=int, default=DEFAULT_Q_POINTS)
    ap.add_argument("--out", default="floor.csv")
    args = ap.parse_args()
    rows, summary = scan_floor(DEFAULT_P_GRID, q_points=args.q_points, n=args.n)
    with open(args.out, "w") as fh:
        fh.write(_csv(rows))
    print(f"{'p':>6} {'min ratio':>10} {'max ratio':>10}")
    for p in DEFAULT_P_GRID:
        r = [row["ratio"] for row in rows if row["p"] == p]
        print(f"{p:6g} {min(r):10.4f} {max(r):10.4f}")
    print(f"overall minimum {summary['min_ratio']:.4f} (threshold {summary['threshold']:.4f})")


if __name__ == "__main__":
    main()
