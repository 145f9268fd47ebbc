"""Energy functionals on bubble superpositions.

    I(u)     = ||u||_lam^2 / 2 - int a |u|^{p+1} / (p+1)
    J(u)     = ||u||_lam^2 / (int a |u|^{p+1})^{2/(p+1)}
    J_inf(u) = the same with a = 1

with ||u||_lam^2 = int |grad u|^2 - lam u^2. For u = sum c_i w(d(., b_i)) the
quadratic part is assembled from pair integrals, which depend on the two
centers only through their distance. The power integrals are not bilinear
and are evaluated on an axial grid, so all centers (and the origin, when a
is not identically 1) must lie on one geodesic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bubble import RadialProfile
from .errors import ConfigError
from .hypgeom import BallPoint, ModelParams, cos_angle, hyp_distance
from .quad import (AxialLayout, Integral, QuadratureSpec, axial_grid, axial_layout,
                   biaxial_integrate, radial_integrate)


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Radial weight a(x) = a(d(x, 0)).

    kind "unit": a = 1. kind "exp_defect": a = 1 - C exp(-delta rho) with
    0 < C < 1. kind "radial_table": piecewise linear in rho through
    (grid, values), equal to 1 beyond the table.
    """

    kind: str = "unit"
    C: float = 0.0
    delta: float = 1.0
    grid: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.kind == "unit":
            return
        if self.kind == "exp_defect":
            if not 0 < self.C < 1:
                raise ConfigError(f"ExpDefect needs 0 < C < 1 for a > 0, got C = {self.C}")
            if not self.delta > 0:
                raise ConfigError("ExpDefect needs delta > 0")
            return
        if self.kind == "radial_table":
            g = np.asarray(self.grid, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if g.ndim != 1 or g.size < 2 or g.shape != v.shape or np.any(np.diff(g) <= 0):
                raise ConfigError("radial table needs increasing grid and matching values")
            if np.any(v <= 0):
                raise ConfigError("coefficient must be positive everywhere")
            if abs(v[-1] - 1.0) > 1e-12:
                raise ConfigError("radial table must reach its limit 1 at the last node")
            return
        raise ConfigError(f"unknown coefficient kind {self.kind!r}")

    @classmethod
    def unit(cls):
        return cls("unit")

    @classmethod
    def exp_defect(cls, C: float, delta: float):
        return cls("exp_defect", C=C, delta=delta)

    @classmethod
    def radial_table(cls, grid, values):
        return cls("radial_table", grid=tuple(grid), values=tuple(values))

    @property
    def is_unit(self) -> bool:
        return self.kind == "unit"

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.kind == "unit":
            return np.ones_like(rho)
        if self.kind == "exp_defect":
            return 1.0 - self.C * np.exp(-self.delta * rho)
        return np.interp(rho, self.grid, self.values, right=1.0)

    def one_minus(self, rho):
        """1 - a(rho), computed without cancellation where possible."""
        rho = np.asarray(rho, dtype=float)
        if self.kind == "unit":
            return np.zeros_like(rho)
        if self.kind == "exp_defect":
            return self.C * np.exp(-self.delta * rho)
        return 1.0 - self(rho)

    def defect(self, rho):
        return np.maximum(self.one_minus(rho), 0.0)

    def decay_bound(self):
        """(C, delta) with (1 - a)_+ <= C exp(-delta rho), or None if none is found."""
        if self.kind == "unit":
            return (0.0, math.inf)
        if self.kind == "exp_defect":
            return (self.C, self.delta)
        # a table reaches 1 at its last node, so any delta works with a large enough C
        g = np.asarray(self.grid)
        delta = 1.0
        C = float(np.max(self.defect(g) * np.exp(delta * g)))
        return (C, delta)

    def to_dict(self) -> dict:
        if self.kind == "unit":
            return {"kind": "unit"}
        if self.kind == "exp_defect":
            return {"kind": "exp_defect", "C": self.C, "delta": self.delta}
        return {"kind": "radial_table", "grid": list(self.grid), "values": list(self.values)}


def admissible_delta_interval(params: ModelParams, K: float) -> tuple[float, float]:
    """The window (K c + N - 1, (p+1) c) for the defect exponent delta."""
    c = params.decay_rate
    return (K * c + params.N - 1, (params.p + 1) * c)


def default_K(params: ModelParams) -> float:
    """Midpoint of (0, (p+1) - (N-1)/c)."""
    return 0.5 * ((params.p + 1) - (params.N - 1) / params.decay_rate)


def delta_report(params: ModelParams, a: CoefficientField, K: float | None = None) -> dict:
    K = default_K(params) if K is None else K
    lo, hi = admissible_delta_interval(params, K)
    K_max = (params.p + 1) - (params.N - 1) / params.decay_rate
    out = {"K": K, "K_max": K_max, "delta_interval": [lo, hi], "interval_empty": not lo < hi,
           "K_valid": 0 < K < K_max}
    if a.kind == "exp_defect":
        out["delta"] = a.delta
        out["delta_admissible"] = lo < a.delta < hi
    return out


@dataclass(frozen=True, eq=False)
class BubbleSum:
    """u(x) = sum_i coeff_i * w(d(x, center_i)); empty means u = 0."""

    profile: RadialProfile
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((c if isinstance(c, BallPoint) else BallPoint(c), float(k))
                      for c, k in self.terms)
        for c, k in terms:
            if k < 0 or not math.isfinite(k):
                raise ConfigError("bubble coefficients must be finite and nonnegative")
            if c.dim != self.profile.params.N:
                raise ConfigError("center dimension does not match N")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, profile, center=None, coeff=1.0):
        center = BallPoint.origin(profile.params.N) if center is None else center
        return cls(profile, ((center, coeff),))

    @property
    def params(self) -> ModelParams:
        return self.profile.params

    @property
    def centers(self):
        return [c for c, _ in self.terms]

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([k for _, k in self.terms])

    @property
    def is_zero(self) -> bool:
        return not self.terms or not np.any(self.coeffs > 0)

    def scaled(self, factor: float) -> "BubbleSum":
        return BubbleSum(self.profile, tuple((c, factor * k) for c, k in self.terms))

    def __add__(self, other: "BubbleSum") -> "BubbleSum":
        if other.profile is not self.profile:
            raise ConfigError("bubble sums built on different profiles")
        return BubbleSum(self.profile, self.terms + other.terms)

    def __call__(self, x):
        x = np.asarray(x.coords if isinstance(x, BallPoint) else x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for c, k in self.terms:
            out = out + k * self.profile.value(hyp_distance(x, c.coords))
        return out


def _check_same(u: BubbleSum, v: BubbleSum):
    if u.profile is not v.profile and u.params != v.params:
        raise ConfigError("mismatched model parameters")


@lru_cache(maxsize=256)
def _pair_terms(W: RadialProfile, D: float, spec: QuadratureSpec) -> tuple[float, float]:
    """(int grad u1 . grad u2, int u1 u2) for unit bubbles at distance D."""
    P = W.params
    if D < 1e-12:
        kinks = [W.rho_max]
        g = radial_integrate(lambda r: W.derivative(r) ** 2, P, spec, kinks).value
        m = radial_integrate(lambda r: W.value(r) ** 2, P, spec, kinks).value
        return g, m
    grid = axial_grid(AxialLayout((0.0, D)), P, spec)
    d1, d2 = grid.distance_to(0.0), grid.distance_to(D)
    cg = cos_angle(d1, d2, D)
    g = grid.integrate(W.derivative(d1) * W.derivative(d2) * cg, "gradient pair").value
    m = grid.integrate(W.value(d1) * W.value(d2), "L2 pair").value
    return g, m


def pair_terms(W, b1: BallPoint, b2: BallPoint, spec: QuadratureSpec = QuadratureSpec()):
    D = hyp_distance(b1, b2)
    return _pair_terms(W, float(round(D, 13)), spec)


def _bilinear(u: BubbleSum, v: BubbleSum, spec, weight_grad: float, weight_l2: float) -> float:
    _check_same(u, v)
    total = 0.0
    for bi, ci in u.terms:
        for bj, dj in v.terms:
            if ci == 0 or dj == 0:
                continue
            g, m = pair_terms(u.profile, bi, bj, spec)
            total += ci * dj * (weight_grad * g + weight_l2 * m)
    return total


def hlambda_inner(u: BubbleSum, v: BubbleSum, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """<u, v>_lam = int grad u . grad v - lam u v."""
    return _bilinear(u, v, spec, 1.0, -u.params.lam)


def dirichlet_inner(u, v, spec=QuadratureSpec()) -> float:
    return _bilinear(u, v, spec, 1.0, 0.0)


def l2_inner(u, v, spec=QuadratureSpec()) -> float:
    return _bilinear(u, v, spec, 0.0, 1.0)


def interaction(W: RadialProfile, b1: BallPoint, b2: BallPoint,
                spec: QuadratureSpec = QuadratureSpec()) -> float:
    """int w(d(x, b1))^p w(d(x, b2)) dV."""
    p = W.params.p
    return float(biaxial_integrate(lambda d1, d2: W.value(d1) ** p * W.value(d2),
                                   b1, b2, W.params, spec))


@lru_cache(maxsize=6)
def _cached_grid(positions: tuple, params: ModelParams, spec: QuadratureSpec):
    return axial_grid(AxialLayout(positions), params, spec)


class BubbleNodes:
    """Bubble values and a(x) tabulated on an axial grid for a fixed set of centers.

    Evaluating power integrals for many coefficient vectors over the same
    centers reuses the tabulation.
    """

    def __init__(self, profile: RadialProfile, centers, a: CoefficientField,
                 spec: QuadratureSpec = QuadratureSpec(), need_origin: bool | None = None):
        N = profile.params.N
        need_origin = (not a.is_unit) if need_origin is None else need_origin
        layout, idx = axial_layout(centers, N, include_origin=need_origin)
        self.layout = layout
        self.grid = _cached_grid(layout.positions, profile.params, spec)
        self.profile = profile
        self.a = a
        self.p = profile.params.p
        self.bubbles = [profile.value(self.grid.anchor_distance(k)) for k in idx]
        if need_origin:
            self.rho0 = self.grid.distance_to(0.0)
            self.one_minus_a = a.one_minus(self.rho0)
        else:
            self.rho0 = None
            self.one_minus_a = None

    def field(self, coeffs) -> np.ndarray:
        u = np.zeros(self.grid.size)
        for c, b in zip(coeffs, self.bubbles):
            if c:
                u += c * b
        return u

    def power(self, coeffs) -> tuple[Integral, Integral]:
        """(int |u|^{p+1}, int a |u|^{p+1})."""
        up = np.abs(self.field(coeffs)) ** (self.p + 1)
        unit = self.grid.integrate(up, "power integral")
        if self.one_minus_a is None:
            return unit, unit
        defect = self.grid.integrate(self.one_minus_a * up, "defect integral")
        return unit, Integral(unit.value - defect.value, unit.tail + defect.tail)

    def signed_defect(self, coeffs) -> float:
        """int (1 - a) |u|^{p+1}; zero when a is identically one."""
        if self.one_minus_a is None:
            return 0.0
        up = np.abs(self.field(coeffs)) ** (self.p + 1)
        return self.grid.integrate(self.one_minus_a * up, "defect integral").value

    def defect(self, coeffs) -> Integral:
        up = np.abs(self.field(coeffs)) ** (self.p + 1)
        return self.grid.integrate(self.a.defect(self.rho0) * up, "defect integral")


def defect_integral(u: BubbleSum, a: CoefficientField,
                    spec: QuadratureSpec = QuadratureSpec()) -> float:
    """int (1 - a)_+ u^{p+1} dV."""
    if a.is_unit or u.is_zero:
        return 0.0
    nodes = BubbleNodes(u.profile, u.centers, a, spec, need_origin=True)
    return nodes.defect(u.coeffs).value


@dataclass(frozen=True)
class EnergyReport:
    norm_sq_lambda: float
    nonlinear_a: float
    nonlinear_unit: float
    J: float
    J_inf: float
    I: float
    tail_mass_estimates: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "norm_sq_lambda": self.norm_sq_lambda,
            "nonlinear_a": self.nonlinear_a,
            "nonlinear_unit": self.nonlinear_unit,
            "J": self.J,
            "J_inf": self.J_inf,
            "I": self.I,
            "tail_mass_estimates": self.tail_mass_estimates,
        }


def energy_from_parts(norm_sq: float, power_a: float, power_unit: float, p: float,
                      tails=None) -> EnergyReport:
    if not power_a > 0 or not power_unit > 0:
        raise ConfigError("J is undefined for the zero function")
    e = 2.0 / (p + 1)
    return EnergyReport(norm_sq, power_a, power_unit, norm_sq / power_a**e,
                        norm_sq / power_unit**e, 0.5 * norm_sq - power_a / (p + 1),
                        dict(tails or {}))


def evaluate_energy(u: BubbleSum, a: CoefficientField = CoefficientField(),
                    spec: QuadratureSpec = QuadratureSpec()) -> EnergyReport:
    if u.is_zero:
        raise ConfigError("J is undefined for the zero function")
    norm_sq = hlambda_inner(u, u, spec)
    nodes = BubbleNodes(u.profile, u.centers, a, spec)
    unit, weighted = nodes.power(u.coeffs)
    return energy_from_parts(norm_sq, weighted.value, unit.value, u.params.p,
                             {"power_unit": unit.tail, "power_a": weighted.tail})


def ps_level(base_level: float, bubble_levels=()) -> float:
    """Energy of a Palais-Smale limit: weak limit plus the escaping bubbles."""
    return float(base_level) + float(sum(bubble_levels))


def bubble_energy(A: float, p: float) -> float:
    """I_{lam,1}(w) = (1/2 - 1/(p+1)) A for a solution w with ||w||^2 = int w^{p+1} = A."""
    return (0.5 - 1.0 / (p + 1)) * A


def radial_rayleigh(f, df, params: ModelParams, spec: QuadratureSpec = QuadratureSpec(),
                    breakpoints=()) -> float:
    """int |f'|^2 dV / int f^2 dV for a radial function f(rho)."""
    num = radial_integrate(lambda r: df(r) ** 2, params, spec, breakpoints).value
    den = radial_integrate(lambda r: f(r) ** 2, params, spec, breakpoints).value
    return num / den


def cross_power(nodes: BubbleNodes, coeffs) -> Integral:
    """int (c1 u1 + c2 u2)^{p+1} - (c1 u1)^{p+1} - (c2 u2)^{p+1}, without cancellation."""
    if len(nodes.bubbles) != 2 or len(coeffs) != 2:
        raise ConfigError("cross_power takes exactly two bubbles")
    q = nodes.p + 1
    a = abs(coeffs[0]) * nodes.bubbles[0]
    b = abs(coeffs[1]) * nodes.bubbles[1]
    hi, lo = np.maximum(a, b), np.minimum(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(hi > 0, lo / hi, 0.0)
        # (hi + lo)^q - hi^q = hi^q expm1(q log1p(lo/hi))
        vals = hi**q * np.expm1(q * np.log1p(ratio)) - lo**q
    return nodes.grid.integrate(vals, "cross power integral")


def two_bubble_margin(t: float, p: float, A: float, G12: float, cross: float,
                      defect: float) -> float:
    """S_2 - J(t u1 + (1-t) u2) for unit-norm-A bubbles, evaluated in log form.

    Uses ||u_i||^2 = int u_i^{p+1} = A, so J / S_2 = phi(t)/phi(1/2) (1+g) / (1+q)^{2/(p+1)}
    with g, q the relative interaction and (cross - defect) corrections.
    """
    e = 2.0 / (p + 1)
    s = t - 0.5
    s2 = t * t + (1 - t) ** 2
    sp = t ** (p + 1) + (1 - t) ** (p + 1)
    with np.errstate(divide="ignore"):
        half_sum = 0.5 * (np.expm1((p + 1) * np.log1p(2 * s))
                          + np.expm1((p + 1) * np.log1p(-2 * s)))
    log_phi = math.log1p(4 * s * s) - e * math.log1p(half_sum)
    g = 2 * t * (1 - t) * G12 / (s2 * A)
    q = (cross - defect) / (sp * A)
    L = log_phi + math.log1p(g) - e * math.log1p(q)
    S2 = (2 * A) ** ((p - 1) / (p + 1))
    return -S2 * math.expm1(L)
