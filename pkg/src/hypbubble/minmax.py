"""Center of mass, the boundary/interior bubble maps and the min-max bracket.

Paths are restricted to the two poles of the diameter through x2, so every
bubble pair is collinear with the origin and the axial quadrature applies.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .bubble import RadialProfile, energy_levels, norm_A
from .energy import (BubbleNodes, BubbleSum, CoefficientField, cross_power, energy_from_parts,
                     hlambda_inner, pair_terms, two_bubble_margin)
from .errors import ConfigError
from .hypgeom import BallPoint, ModelParams, radial_coord
from .quad import QuadratureSpec

K_CENTER = 0.5  # sup of |x| / d(x, 0) over the ball, approached as x -> 0
M_SCALE = math.tanh(0.5)


def k_estimate(n: int = 200_000) -> tuple[float, float]:
    """Grid maximum of r / d(r, 0) for r in (0, 1); returns (value, argmax r)."""
    r = np.geomspace(1e-8, 1.0 - 1e-12, n)
    ratio = r / radial_coord(r)
    i = int(np.argmax(ratio))
    return float(ratio[i]), float(r[i])


def _mass_terms(nodes: BubbleNodes, coeffs):
    """(int |u|^{p+1}, axial moment int (x.e)/(k d(x,0)) |u|^{p+1}) on the node grid."""
    up = np.abs(nodes.field(coeffs)) ** (nodes.p + 1)
    d0 = nodes.rho0
    t = nodes.grid.t
    with np.errstate(invalid="ignore", divide="ignore"):
        # |x| = tanh(d0/2); the angle phi at 0 between x and the axis has cos = tanh t / tanh d0
        radial = np.where(d0 > 1e-8, np.tanh(0.5 * d0) / (K_CENTER * d0), 1.0 / (2 * K_CENTER))
        cosphi = np.where(d0 > 0, np.clip(np.tanh(t) / np.tanh(d0), -1.0, 1.0), 0.0)
    moment = nodes.grid.integrate(radial * cosphi * up, "center of mass").value
    mass = nodes.grid.integrate(up, "power integral").value
    return mass, moment


def center_of_mass(u: BubbleSum, spec: QuadratureSpec = QuadratureSpec()) -> BallPoint:
    if u.is_zero:
        raise ConfigError("center of mass is undefined for the zero function")
    N = u.params.N
    if all(c.norm == 0 for c in u.centers):
        return BallPoint.origin(N)
    nodes = BubbleNodes(u.profile, u.centers, CoefficientField.unit(), spec, need_origin=True)
    axis = nodes.layout.axis
    if axis is None:
        raise ConfigError("center of mass needs bubble centers on a diameter")
    mass, moment = _mass_terms(nodes, u.coeffs)
    return BallPoint(M_SCALE * moment / mass * axis)


def h_star(x1: BallPoint, x2: BallPoint, t: float, W: RadialProfile,
           spec: QuadratureSpec = QuadratureSpec()) -> BubbleSum:
    """(t w(d(., x1)) + (1-t) w(d(., x2))) scaled to unit H_lambda norm."""
    if not 0.0 <= t <= 1.0:
        raise ConfigError("t must lie in [0, 1]")
    terms = tuple((c, k) for c, k in ((x1, t), (x2, 1.0 - t)) if k != 0.0)
    u = BubbleSum(W, terms)
    if u.is_zero:
        raise ConfigError("degenerate normalization")
    nsq = hlambda_inner(u, u, spec)
    if not nsq > 0:
        raise ConfigError("degenerate normalization")
    return u.scaled(1.0 / math.sqrt(nsq))


@dataclass
class PathConfig:
    params: ModelParams
    a: CoefficientField = field(default_factory=CoefficientField.unit)
    R2: float = 12.0
    x2_rho: float | None = None
    t_grid: list = field(default_factory=lambda: list(np.linspace(0, 1, 51)))
    boundary_samples: int = 8
    alpha: float = 1.2
    alpha_prime: float = 1.1

    def __post_init__(self):
        if not self.alpha > self.alpha_prime > 1:
            raise ConfigError("need alpha > alpha' > 1")
        if not self.R2 > 1:
            raise ConfigError("R2 must exceed 1")
        if self.x2_rho is None:
            self.x2_rho = self.R2 - self.R2 ** (self.alpha_prime / self.alpha)
        if not 0 <= self.x2_rho < self.R2:
            raise ConfigError("x2 must lie inside B(0, R2)")
        if self.boundary_samples < 1:
            raise ConfigError("boundary_samples must be positive")
        if any(not 0 <= t <= 1 for t in self.t_grid):
            raise ConfigError("t grid must lie in [0, 1]")


@dataclass
class PathSample:
    pole: int  # +1: x1 on the same side as x2, -1: opposite side
    t: float
    J: float
    margin: float
    m_axial: float

    CSV_FIELDS = ("pole", "t", "J", "margin", "m_first_coordinate")

    def csv_row(self) -> list:
        return [self.pole, self.t, self.J, self.margin, self.m_axial]


@dataclass
class MinmaxReport:
    S1: float
    S2: float
    boundary_max_J: float
    path_max_J: float
    bracket_ok: bool
    x2_rho: float
    R2: float
    k: float
    boundary_J: list
    samples: list
    sign_change: bool
    interior_max: bool
    all_below_S2: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["samples"] = [asdict(s) for s in self.samples]
        return d


def _path(W, nr, levels, cfg, pole, spec):
    P = W.params
    axis = np.eye(P.N)[-1]
    x1 = BallPoint.from_polar(cfg.R2, pole * axis)
    x2 = BallPoint.from_polar(cfg.x2_rho, axis)
    g, m = pair_terms(W, x1, x2, spec)
    G12 = g - P.lam * m
    nodes = BubbleNodes(W, [x1, x2], cfg.a, spec, need_origin=True)
    sign = float(np.dot(nodes.layout.axis, axis))
    out = []
    for t in cfg.t_grid:
        t = float(t)
        coeffs = [t, 1.0 - t]
        nsq = (t * t + (1 - t) ** 2) * nr.norm_sq_lambda + 2 * t * (1 - t) * G12
        unit, weighted = nodes.power(coeffs)
        J = energy_from_parts(nsq, weighted.value, unit.value, P.p).J
        margin = two_bubble_margin(t, P.p, nr.A, G12, cross_power(nodes, coeffs).value,
                                   nodes.signed_defect(coeffs))
        mass, moment = _mass_terms(nodes, coeffs)
        out.append(PathSample(pole, t, J, margin, sign * M_SCALE * moment / mass))
    return out


def boundary_energies(W: RadialProfile, a: CoefficientField, R2: float, samples: int,
                      norm_sq: float, spec: QuadratureSpec = QuadratureSpec()) -> list[float]:
    """J of the normalized single bubble at distance R2 in several directions."""
    P = W.params
    out = []
    for k in range(samples):
        ang = 2 * math.pi * k / samples
        direction = np.zeros(P.N)
        direction[-1] = math.cos(ang)
        direction[0] += math.sin(ang)
        x1 = BallPoint.from_polar(R2, direction)
        nodes = BubbleNodes(W, [x1], a, spec, need_origin=True)
        unit, weighted = nodes.power([1.0])
        out.append(energy_from_parts(norm_sq, weighted.value, unit.value, P.p).J)
    return out


def minmax_bracket(cfg: PathConfig, W: RadialProfile,
                   spec: QuadratureSpec = QuadratureSpec()) -> MinmaxReport:
    if W.params != cfg.params:
        raise ConfigError("profile solved for different parameters")
    nr = norm_A(W, spec)
    levels = energy_levels(nr.A, W.params)
    samples = _path(W, nr, levels, cfg, +1, spec) + _path(W, nr, levels, cfg, -1, spec)
    bJ = boundary_energies(W, cfg.a, cfg.R2, cfg.boundary_samples, nr.norm_sq_lambda, spec)
    # the maximum is located by margin, which resolves differences below rounding in J
    margins = np.array([s.margin for s in samples])
    best = samples[int(np.argmin(margins))]
    path_max = levels.S2 - best.margin
    ms = np.array([s.m_axial for s in samples])
    return MinmaxReport(
        S1=levels.S1,
        S2=levels.S2,
        boundary_max_J=float(max(bJ)),
        path_max_J=path_max,
        bracket_ok=bool(levels.S1 < path_max and best.margin > 0),
        x2_rho=float(cfg.x2_rho),
        R2=cfg.R2,
        k=K_CENTER,
        boundary_J=bJ,
        samples=samples,
        sign_change=bool(ms.min() < 0 < ms.max()),
        interior_max=0.0 < best.t < 1.0,
        all_below_S2=bool(np.all(margins > 0)),
    )
