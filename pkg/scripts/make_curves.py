"""Emit tangle-vs-alpha CSV curves for the coherent-encoded families.

Writes one CSV per requested family plus the GHZ3/anti-W3 mixture sweep.

Example:
    python3 scripts/make_curves.py --out-dir curves/
"""

import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from entclass import coherent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--families", default=",".join(coherent.FAMILIES))
    ap.add_argument("--alpha-start", type=float, default=0.1)
    ap.add_argument("--alpha-stop", type=float, default=3.0)
    ap.add_argument("--alpha-count", type=int, default=60)
    ap.add_argument("--epsilon", type=float, default=1e-3)
    ap.add_argument("--mix-grid", default="0.0:0.5:51",
                    help="b grid for the mixture sweep, start:stop:count")
    ap.add_argument("--out-dir", required=True)
    args = ap.parse_args()

    os.makedirs(args.out_dir, exist_ok=True)
    grid = np.linspace(args.alpha_start, args.alpha_stop, args.alpha_count)
    for family in [f.strip() for f in args.families.split(",") if f.strip()]:
        out = os.path.join(args.out_dir, f"{family}.csv")
        rows = coherent.emit_curves([family], grid, out, epsilon=args.epsilon)
        print(f"{family}: {len(rows)} rows -> {out}")

    start, stop, count = args.mix_grid.split(":")
    bgrid = np.linspace(float(start), float(stop), int(count))
    out = os.path.join(args.out_dir, "mix3.csv")
    rows = coherent.emit_curves(["mix3"], bgrid, out, epsilon=args.epsilon)
    print(f"mix3: {len(rows)} rows -> {out}")


if __name__ == "__main__":
    main()
