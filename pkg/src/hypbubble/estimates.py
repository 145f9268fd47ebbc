"""Numerical checks of the two-bubble energy estimates.

The central object is the sweep of J(t u1 + (1-t) u2) against S_2 for two
translated bubbles u_i = w(d(., x_i)) placed on a common diameter.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bubble import RadialProfile, energy_levels, norm_A
from .energy import (BubbleNodes, CoefficientField, cross_power, default_K, delta_report,
                     energy_from_parts, pair_terms, two_bubble_margin)
from .errors import ConfigError
from .hypgeom import MAX_RHO, BallPoint, ModelParams
from .quad import QuadratureSpec


def convex_inequality_check(a, b, p: float):
    """(a+b)^{p+1} - a^{p+1} - b^{p+1} - p (a^p b + a b^p); nonnegative for p > 1."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise ConfigError("convex inequality needs nonnegative inputs")
    out = (a + b) ** (p + 1) - a ** (p + 1) - b ** (p + 1) - p * (a**p * b + a * b**p)
    return float(out) if out.ndim == 0 else out


def decay_sandwich_check(W: RadialProfile, eps: float) -> tuple[float, float]:
    """C1 = inf w e^{(c+eps) rho}, C2 = sup w e^{(c-eps) rho} over the profile grid."""
    c = W.params.decay_rate
    if not 0 < eps < c:
        raise ConfigError(f"eps must lie in (0, c) = (0, {c:g})")
    rho, w = W.grid, W.values
    C1 = float(np.min(w * np.exp((c + eps) * rho)))
    C2 = float(np.max(w * np.exp((c - eps) * rho)))
    return C1, C2


@dataclass
class InteractionFit:
    separations: list
    values: list
    fitted_exponent: float
    intercept: float
    lower_constant: float  # min over the sweep of I(d) e^{(c+eps) d}
    eps: float
    decay_rate: float

    @property
    def exponent_in_band(self) -> bool:
        c = self.decay_rate
        return -(c + self.eps) <= self.fitted_exponent <= -(c - self.eps)

    @property
    def ok(self) -> bool:
        return self.lower_constant > 0 and self.exponent_in_band

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(exponent_in_band=self.exponent_in_band, ok=self.ok)
        return d


def interaction_sweep(W: RadialProfile, separations, spec=QuadratureSpec()) -> list[float]:
    N = W.params.N
    axis = np.eye(N)[0]
    out = []
    for d in separations:
        nodes = BubbleNodes(W, [BallPoint.origin(N), BallPoint.from_polar(d, axis)],
                            CoefficientField.unit(), spec)
        w1, w2 = nodes.bubbles
        out.append(nodes.grid.integrate(w1**W.params.p * w2).value)
    return out


def interaction_lower_bound_check(W: RadialProfile, separations, eps: float = 0.1,
                                  spec: QuadratureSpec = QuadratureSpec()) -> InteractionFit:
    seps = [float(d) for d in separations]
    if min(seps) < 4:
        raise ConfigError("separations must be >= 4")
    vals = interaction_sweep(W, seps, spec)
    slope, intercept = np.polyfit(seps, np.log(vals), 1)
    c = W.params.decay_rate
    lower = min(v * math.exp((c + eps) * d) for v, d in zip(vals, seps))
    return InteractionFit(seps, vals, float(slope), float(intercept), float(lower), eps, c)


def t_ratio_profile(p: float, t_grid) -> np.ndarray:
    """phi(t) = (t^2 + (1-t)^2) / (t^{p+1} + (1-t)^{p+1})^{2/(p+1)}."""
    if not p > 1:
        raise ConfigError("p must exceed 1")
    t = np.asarray(t_grid, dtype=float)
    return (t**2 + (1 - t) ** 2) / (t ** (p + 1) + (1 - t) ** (p + 1)) ** (2 / (p + 1))


def t_ratio_bound_check(p: float, step: float = 1e-3, exclusion: float = 0.05) -> dict:
    """phi <= 2^{(p-1)/(p+1)} on a grid; strict outside (1/2 - exclusion, 1/2 + exclusion)."""
    n = int(round(1.0 / step))
    t = np.linspace(0.0, 1.0, n + 1)
    phi = t_ratio_profile(p, t)
    bound = 2.0 ** ((p - 1) / (p + 1))
    outside = np.abs(t - 0.5) >= exclusion
    at_bound = np.abs(phi - bound) <= 1e-14 * bound
    return {
        "p": p,
        "bound": bound,
        "max_phi": float(phi.max()),
        "argmax": float(t[np.argmax(phi)]),
        "max_outside": float(phi[outside].max()),
        "bounded": bool(np.all(phi <= bound * (1 + 1e-14))),
        "strict_outside": bool(np.all(phi[outside] < bound)),
        "equality_points": t[at_bound].tolist(),
    }


# ---------------------------------------------------------------------------
# key two-bubble sweep


@dataclass
class LemmaSweepConfig:
    params: ModelParams
    a: CoefficientField = field(default_factory=CoefficientField.unit)
    K: float | None = None
    alpha: float = 1.2
    alpha_prime: float = 1.1
    R: float = 8.0
    center_rhos: list = field(default_factory=lambda: [12.0])
    separations: list = field(default_factory=lambda: [8.0, 10.0, 12.0])
    t_grid: list = field(default_factory=lambda: list(np.linspace(0, 1, 51)))
    placement: str = "same-side"
    strict_regime: bool = False

    def __post_init__(self):
        if not self.alpha > self.alpha_prime > 1:
            raise ConfigError("need alpha > alpha' > 1")
        if not self.R > 1:
            raise ConfigError("R must exceed 1")
        if any(not 0 <= t <= 1 for t in self.t_grid):
            raise ConfigError("t grid must lie in [0, 1]")
        if self.placement not in ("same-side", "antipodal"):
            raise ConfigError(f"unknown placement {self.placement!r}")
        if self.K is None:
            self.K = default_K(self.params)
        if self.strict_regime:
            for rc in self.center_rhos:
                for d in self.separations:
                    geo = place_pair(rc, d, self.placement, self.params.N)
                    if geo is None or not self.window(geo[0], geo[1], d):
                        raise ConfigError(
                            f"center rho {rc}, separation {d} violates the strict regime window")

    def window(self, rho1: float, rho2: float, sep: float) -> bool:
        R, al, alp = self.R, self.alpha, self.alpha_prime
        return (min(rho1, rho2) >= R**al and R**alp <= sep <= R ** (alp - al) * min(rho1, rho2))


@dataclass
class SweepRow:
    t: float
    separation: float
    center_rhos: tuple
    J_value: float
    S2: float
    margin: float
    interaction: float
    defect: float
    defect_over_interaction: float
    J_inf: float
    in_regime: bool

    CSV_FIELDS = ("t", "separation", "rho1", "rho2", "J", "J_inf", "S2", "margin",
                  "interaction", "defect", "defect_over_interaction", "in_regime")

    def csv_row(self) -> list:
        return [self.t, self.separation, self.center_rhos[0], self.center_rhos[1], self.J_value,
                self.J_inf, self.S2, self.margin, self.interaction, self.defect,
                self.defect_over_interaction, int(self.in_regime)]


@dataclass
class SweepResult:
    rows: list
    skipped: list
    S1: float
    S2: float
    endpoints: list  # per geometry: J at t = 0 and 1, argmax t
    regime: dict

    @property
    def min_margin(self) -> float:
        return min(r.margin for r in self.rows) if self.rows else math.nan

    def summary(self) -> dict:
        return {
            "S1": self.S1,
            "S2": self.S2,
            "rows": len(self.rows),
            "min_margin": self.min_margin,
            "all_below_S2": all(r.margin > 0 for r in self.rows),
            "skipped": self.skipped,
            "endpoints": self.endpoints,
            "regime": self.regime,
        }


def place_pair(center_rho: float, separation: float, placement: str, N: int):
    """Radial positions (rho1, rho2) and sides (+1/-1) on the first axis, or None."""
    if placement == "same-side":
        rho1, rho2, side2 = center_rho, center_rho + separation, 1.0
    else:
        rho1, rho2, side2 = center_rho, separation - center_rho, -1.0
        if rho2 < 0:
            return None
    if rho2 > MAX_RHO or rho1 > MAX_RHO:
        return None
    return rho1, rho2, side2


def pair_centers(rho1: float, rho2: float, side2: float, N: int):
    axis = np.eye(N)[0]
    return BallPoint.from_polar(rho1, axis), BallPoint.from_polar(rho2, side2 * axis)


def _geometry_rows(W, A_norm, A_power, levels, cfg, rc, d, spec):
    P = W.params
    geo = place_pair(rc, d, cfg.placement, P.N)
    if geo is None:
        return None, {"center_rho": rc, "separation": d,
                      "reason": "requested separation not realizable on a diameter"}
    rho1, rho2, side2 = geo
    x1, x2 = pair_centers(rho1, rho2, side2, P.N)
    g, m = pair_terms(W, x1, x2, spec)
    G12 = g - P.lam * m
    nodes = BubbleNodes(W, [x1, x2], cfg.a, spec, need_origin=True)
    w1, w2 = nodes.bubbles
    inter = nodes.grid.integrate(w1**P.p * w2).value
    defect = nodes.defect([1.0, 1.0]).value
    in_regime = cfg.window(rho1, rho2, d)
    rows = []
    for t in cfg.t_grid:
        t = float(t)
        norm_sq = (t * t + (1 - t) ** 2) * A_norm + 2 * t * (1 - t) * G12
        unit, weighted = nodes.power([t, 1 - t])
        rep = energy_from_parts(norm_sq, weighted.value, unit.value, P.p)
        margin = two_bubble_margin(t, P.p, A_power, G12, cross_power(nodes, [t, 1 - t]).value,
                                   nodes.signed_defect([t, 1 - t]))
        rows.append(SweepRow(t, d, (rho1, rho2), rep.J, levels.S2, margin, inter,
                             defect, defect / inter, rep.J_inf, in_regime))
    Js = np.array([r.J_value for r in rows])
    ts = np.array([r.t for r in rows])
    ends = {"separation": d, "center_rhos": [rho1, rho2],
            "argmax_t": float(ts[np.argmax(Js)]), "max_J": float(Js.max())}
    for tv in (0.0, 1.0):
        hit = np.nonzero(ts == tv)[0]
        if hit.size:
            ends[f"J_at_t{int(tv)}"] = float(Js[hit[0]])
            ends[f"J_at_t{int(tv)}_over_S1"] = float(Js[hit[0]] / levels.S1)
    return rows, ends


def key_lemma_sweep(cfg: LemmaSweepConfig, W: RadialProfile,
                    spec: QuadratureSpec = QuadratureSpec(), threads: int = 1) -> SweepResult:
    """J(t u1 + (1-t) u2) vs S_2 over every (center rho, separation, t) cell."""
    if W.params != cfg.params:
        raise ConfigError("profile solved for different parameters")
    nr = norm_A(W, spec)
    levels = energy_levels(nr.A, W.params)
    cells = [(rc, d) for rc in cfg.center_rhos for d in cfg.separations]

    def work(cell):
        return _geometry_rows(W, nr.norm_sq_lambda, nr.A, levels, cfg, cell[0], cell[1], spec)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(work, cells))
    else:
        results = [work(c) for c in cells]
    rows, skipped, endpoints = [], [], []
    for res, info in results:
        if res is None:
            skipped.append(info)
        else:
            rows.extend(res)
            endpoints.append(info)
    regime = delta_report(cfg.params, cfg.a, cfg.K)
    regime.update(R=cfg.R, alpha=cfg.alpha, alpha_prime=cfg.alpha_prime,
                  center_min=cfg.R**cfg.alpha, separation_min=cfg.R**cfg.alpha_prime,
                  separation_max_factor=cfg.R ** (cfg.alpha_prime - cfg.alpha))
    return SweepResult(rows, skipped, levels.S1, levels.S2, endpoints, regime)


def defect_ratio_sweep(W: RadialProfile, a: CoefficientField, center_rhos, separation: float,
                       placement: str = "same-side",
                       spec: QuadratureSpec = QuadratureSpec()) -> list[dict]:
    """defect / interaction as the near center moves out at fixed separation."""
    out = []
    N = W.params.N
    for rc in center_rhos:
        geo = place_pair(rc, separation, placement, N)
        if geo is None:
            raise ConfigError(f"center rho {rc} with separation {separation} not realizable")
        x1, x2 = pair_centers(*geo, N)
        nodes = BubbleNodes(W, [x1, x2], a, spec, need_origin=True)
        w1, w2 = nodes.bubbles
        inter = nodes.grid.integrate(w1**W.params.p * w2).value
        defect = nodes.defect([1.0, 1.0]).value
        out.append({"center_rho": rc, "rhos": [geo[0], geo[1]], "separation": separation,
                    "interaction": inter, "defect": defect, "ratio": defect / inter})
    return out
