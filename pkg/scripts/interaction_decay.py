"""Fit the exponential decay rate of the two-bubble interaction integral."""

import argparse

import numpy as np

from hypbubble.estimates import interaction_lower_bound_check
from hypbubble.hypgeom import ModelParams
from hypbubble.verify import profile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--p", type=float, default=3.0)
    ap.add_argument("--lam", type=float, default=0.0)
    ap.add_argument("--separations", type=float, nargs="+",
                    default=[6.0, 8.0, 10.0, 12.0, 14.0])
    ap.add_argument("--eps", type=float, default=0.1)
    args = ap.parse_args()

    W = profile(ModelParams(args.N, args.p, args.lam))
    fit = interaction_lower_bound_check(W, args.separations, args.eps)
    c = W.params.decay_rate
    for d, v in zip(fit.separations, fit.values):
        print(f"D = {d:6.2f}  interaction = {v:.6e}  e^(cD) * interaction = {v * np.exp(c * d):.6f}")
    print(f"fitted exponent {fit.fitted_exponent:.6f}  expected {-c:.6f}  in band: {fit.exponent_in_band}")


if __name__ == "__main__":
    main()
