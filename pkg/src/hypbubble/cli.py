"""Command-line entry point: ``hypbubble <subcommand> [options]``.

Exit codes: 0 when every asserted margin/tolerance passes, 1 when a check
fails, 2 for configuration errors, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .bubble import energy_levels, norm_A, solve_ground_state
from .config import RunConfig
from .energy import BubbleSum, evaluate_energy, radial_rayleigh
from .errors import ConfigError, NumericalError
from .estimates import interaction_lower_bound_check, key_lemma_sweep
from .io import write_csv, write_json, write_plot
from .minmax import minmax_bracket

log = logging.getLogger("hypbubble")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _profile(cfg: RunConfig):
    return solve_ground_state(cfg.params(), cfg.solver())


def cmd_ground_state(cfg: RunConfig, out: Path, args) -> int:
    W = _profile(cfg)
    nr = norm_A(W, cfg.quadrature())
    W.save(out / "ground_state")
    write_plot(out / "ground_state.dat", W.grid, W.values, ("rho", "w"))
    levels = energy_levels(nr.A, W.params)
    summary = {"header": W.header(), "A": nr.A, "norm_sq_lambda": nr.norm_sq_lambda,
               "A_discrepancy": nr.discrepancy, "S1": levels.S1, "S2": levels.S2}
    write_json(out / "ground_state_summary.json", summary)
    print(f"w(0) = {W.w0!r}  A = {nr.A!r}  tail exponent = {W.tail_exponent!r} "
          f"(c = {W.params.decay_rate!r})")
    return EXIT_OK


def _trial(N: int, R: float):
    # sin(pi rho / R) sinh(rho)^{-(N-1)/2} on [0, R], zero beyond
    k, h = math.pi / R, 0.5 * (N - 1)

    def f(r):
        rr = np.minimum(np.asarray(r, dtype=float), R)
        return np.where(r < R, np.sin(k * rr) * np.sinh(rr) ** -h, 0.0)

    def df(r):
        rr = np.minimum(np.asarray(r, dtype=float), R)
        val = (k * np.cos(k * rr) - h * np.sin(k * rr) / np.tanh(rr)) * np.sinh(rr) ** -h
        return np.where(r < R, val, 0.0)

    return f, df


def cmd_spectrum(cfg: RunConfig, out: Path, args) -> int:
    P = cfg.params()
    bottom = P.spectral_bottom
    rows = []
    for R in cfg.data["spectrum"]["radii"]:
        f, df = _trial(P.N, float(R))
        q = radial_rayleigh(f, df, P, cfg.quadrature(), breakpoints=[float(R)])
        rows.append([float(R), q, bottom])
    write_csv(out / "spectrum.csv", ["R", "rayleigh_quotient", "spectral_bottom"], rows)
    write_plot(out / "spectrum.dat", [r[0] for r in rows], [r[1] for r in rows],
               ("R", "rayleigh_quotient"))
    ok = all(r[1] >= bottom * (1 - 1e-6) for r in rows)
    for R, q, _ in rows:
        print(f"R = {R:g}: quotient {q!r}  (bottom {bottom:g})")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_energy(cfg: RunConfig, out: Path, args) -> int:
    W = _profile(cfg)
    u = BubbleSum(W, tuple(cfg.energy_terms()))
    rep = evaluate_energy(u, cfg.coefficient(), cfg.quadrature())
    write_json(out / "energy.json", {"report": rep.to_dict(),
                                     "coefficient": cfg.coefficient().to_dict()})
    print(f"J = {rep.J!r}  J_inf = {rep.J_inf!r}  I = {rep.I!r}")
    return EXIT_OK


def cmd_interaction(cfg: RunConfig, out: Path, args) -> int:
    W = _profile(cfg)
    block = cfg.data["interaction"]
    fit = interaction_lower_bound_check(W, block["separations"], block["eps"], cfg.quadrature())
    write_json(out / "interaction.json", fit.to_dict())
    write_csv(out / "interaction.csv", ["separation", "interaction"],
              zip(fit.separations, fit.values))
    write_plot(out / "interaction.dat", fit.separations, np.log(fit.values),
               ("separation", "log_interaction"))
    print(f"fitted exponent {fit.fitted_exponent!r} vs -c = {-W.params.decay_rate!r}")
    return EXIT_OK if fit.ok else EXIT_FAIL


def cmd_lemma_sweep(cfg: RunConfig, out: Path, args) -> int:
    sweep = cfg.sweep(strict=args.strict_regime)
    W = _profile(cfg)
    res = key_lemma_sweep(sweep, W, cfg.quadrature(), threads=args.threads or cfg.threads)
    header = list(res.rows[0].CSV_FIELDS) if res.rows else ["t"]
    write_csv(out / "lemma_sweep.csv", header, [r.csv_row() for r in res.rows])
    write_json(out / "lemma_sweep.json", res.summary())
    s = res.summary()
    print(f"{s['rows']} rows, min margin {s['min_margin']!r}, skipped {len(s['skipped'])}")
    return EXIT_OK if res.rows and s["all_below_S2"] else EXIT_FAIL


def cmd_minmax(cfg: RunConfig, out: Path, args) -> int:
    W = _profile(cfg)
    rep = minmax_bracket(cfg.path(), W, cfg.quadrature())
    write_json(out / "minmax.json", rep.to_dict())
    write_csv(out / "minmax_path.csv", ["pole", "t", "J", "margin", "m_first_coordinate"],
              [s.csv_row() for s in rep.samples])
    print(f"S1 = {rep.S1!r}  path max J = {rep.path_max_J!r}  S2 = {rep.S2!r}  "
          f"bracket_ok = {rep.bracket_ok}")
    return EXIT_OK if rep.bracket_ok and rep.all_below_S2 else EXIT_FAIL


def cmd_verify(cfg: RunConfig, out: Path, args) -> int:
    from .verify import run_suite

    criteria = args.only or cfg.data["verify"]["criteria"]
    results = run_suite(criteria, seed=cfg.seed, threads=args.threads or cfg.threads, out=out,
                        echo=print)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {
    "ground-state": cmd_ground_state,
    "spectrum": cmd_spectrum,
    "energy": cmd_energy,
    "interaction": cmd_interaction,
    "lemma-sweep": cmd_lemma_sweep,
    "minmax": cmd_minmax,
    "verify": cmd_verify,
}


def _criteria(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected a comma-separated list of integers") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--output", help="output directory (overrides config and env)")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--threads", type=int, help="worker threads for sweeps")
    common.add_argument("--strict-regime", action="store_true",
                        help="reject sweep geometries outside the separation window")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="hypbubble", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "verify":
            sp.add_argument("--only", type=_criteria, help="comma-separated criterion numbers")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig.from_dict()
        if args.seed is not None or args.threads is not None:
            over = dict(cfg.data)
            if args.seed is not None:
                over["seed"] = args.seed
            if args.threads is not None:
                over["threads"] = args.threads
            cfg = RunConfig(over)
        out = cfg.output_dir(args.output)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
