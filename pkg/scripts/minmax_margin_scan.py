"""Scan the S2 margin at the path midpoint as the inner center x2 moves out.

For each radius of x2 this reports S2 - J(h*(x1, x2, 1/2)) on both poles
x1 = +/- R2 e, with and without the coefficient defect. A negative value means
the path crosses the two-bubble level.
"""

import argparse

import numpy as np

from hypbubble.energy import CoefficientField
from hypbubble.hypgeom import ModelParams
from hypbubble.minmax import PathConfig, minmax_bracket
from hypbubble.verify import profile


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--R2", type=float, default=12.0)
    ap.add_argument("--x2", type=float, nargs="+", default=list(np.arange(1.0, 12.0, 1.0)))
    ap.add_argument("--C", type=float, default=0.5)
    ap.add_argument("--delta", type=float, default=3.5)
    args = ap.parse_args()
    if any(not 0 <= x < args.R2 for x in args.x2):
        ap.error("every --x2 radius must lie in [0, R2)")

    P = ModelParams(3, 3.0, 0.0)
    W = profile(P)
    fields = {"unit": CoefficientField.unit(),
              "defect": CoefficientField.exp_defect(args.C, args.delta)}
    c = P.decay_rate
    if args.delta > c:
        print(f"opposite-pole break-even radius c R2 / (delta - c) = "
              f"{c * args.R2 / (args.delta - c):.3f}")
    print("x2_rho   a        margin(same pole)   margin(opposite pole)")
    for x in args.x2:
        for name, a in fields.items():
            rep = minmax_bracket(PathConfig(P, a, R2=args.R2, x2_rho=float(x), t_grid=[0.5],
                                            boundary_samples=1), W)
            by_pole = {s.pole: s.margin for s in rep.samples}
            print(f"{x:6.2f}   {name:6s}   {by_pole[1.0]: .6e}       {by_pole[-1.0]: .6e}")


if __name__ == "__main__":
    main()
