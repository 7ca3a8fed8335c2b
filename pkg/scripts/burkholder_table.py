"""Optimized good-lambda constants C_1(p), C_2(p) next to their brackets p/4 and 12 e p."""

import argparse
import math

from martbounds.exact_constants import burkholder_C


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+", default=[1, 2, 4, 8, 16, 32, 64])
    args = ap.parse_args()
    print(f"{'p':>6} {'p/4':>8} {'C1':>10} {'C2':>10} {'12ep':>10} {'C1/p':>8}")
    for p in args.p:
        c1 = burkholder_C(1, p).value
        c2 = burkholder_C(2, p).value
        print(f"{p:6g} {p / 4:8.3f} {c1:10.4f} {c2:10.4f} {12 * math.e * p:10.2f} {c1 / p:8.4f}")


if __name__ == "__main__":
    main()
