"""Compare defect/interaction ratios for same-side and antipodal bubble pairs.

Same-side pairs share a ray (centers at rho_c and rho_c + D); antipodal pairs sit
on opposite sides of the origin with both centers at rho_c (separation 2 rho_c).
"""

import argparse

from hypbubble.energy import CoefficientField
from hypbubble.estimates import defect_ratio_sweep
from hypbubble.hypgeom import ModelParams
from hypbubble.verify import profile


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rhos", type=float, nargs="+", default=[10.0, 12.0, 14.0])
    ap.add_argument("--separation", type=float, default=8.0)
    ap.add_argument("--C", type=float, default=0.5)
    ap.add_argument("--delta", type=float, default=3.5)
    args = ap.parse_args()

    W = profile(ModelParams(3, 3.0, 0.0))
    a = CoefficientField.exp_defect(args.C, args.delta)
    print("placement   rho_c   separation   interaction          defect               ratio")
    for rc in args.rhos:
        rows = defect_ratio_sweep(W, a, [rc], args.separation, "same-side")
        rows += defect_ratio_sweep(W, a, [rc], 2 * rc, "antipodal")
        for name, r in zip(("same-side", "antipodal"), rows):
            print(f"{name:10s} {rc:6.2f} {r['separation']:10.2f}   {r['interaction']:.6e}   "
                  f"{r['defect']:.6e}   {r['ratio']:.6e}")


if __name__ == "__main__":
    main()
