"""Run the two-bubble S2 margin sweep over t and separation and print a table."""

import argparse

import numpy as np

from hypbubble.energy import CoefficientField
from hypbubble.estimates import LemmaSweepConfig, key_lemma_sweep
from hypbubble.hypgeom import ModelParams
from hypbubble.verify import profile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--center", type=float, default=12.0)
    ap.add_argument("--separations", type=float, nargs="+", default=[8.0, 10.0, 12.0])
    ap.add_argument("--t-points", type=int, default=11)
    ap.add_argument("--placement", choices=["same-side", "antipodal"], default="same-side")
    ap.add_argument("--unit", action="store_true", help="use a = 1 instead of the defect field")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    P = ModelParams(3, 3.0, 0.0)
    a = CoefficientField.unit() if args.unit else CoefficientField.exp_defect(0.5, 3.5)
    cfg = LemmaSweepConfig(P, a, center_rhos=[args.center], separations=args.separations,
                           t_grid=list(np.linspace(0.0, 1.0, args.t_points)),
                           placement=args.placement)
    res = key_lemma_sweep(cfg, profile(P), threads=args.threads)
    print(f"S1 = {res.S1:.12f}  S2 = {res.S2:.12f}")
    print("    D      t      J                 S2 - J")
    for r in res.rows:
        print(f"{r.separation:6.2f} {r.t:6.3f}  {r.J_value:.12f}  {r.margin: .3e}")
    for s in res.skipped:
        print("skipped:", s)
    print(f"min margin {res.min_margin:.3e}")


if __name__ == "__main__":
    main()
