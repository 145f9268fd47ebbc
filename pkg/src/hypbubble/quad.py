"""Integration over B^N in geodesic polar coordinates.

Radial integrals use the exact volume element omega_{N-1} sinh^{N-1}(rho).
Integrands that depend on x only through distances to points lying on one
geodesic (the "axis") are reduced to two dimensions: every point of the axis
carries a slab-shaped Voronoi cell bounded by perpendicular bisectors, and
each cell is integrated in polar coordinates (rho, theta) about its own
anchor, with theta measured from the positive axis direction. Keeping each
peak at the pole of its own polar chart is what makes far-apart centers
cheap to resolve.

Composite Gauss-Legendre panels of fixed order are used throughout, graded
towards rho = 0, towards the radii where a bisector starts to cut the
sphere, and in theta towards the axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.special import gamma

from .errors import ConfigError, QuadratureError
from .hypgeom import BallPoint, ModelParams, hyp_distance, translate

COLLINEAR_TOL = 1e-9


@dataclass(frozen=True)
class QuadratureSpec:
    rho_max: float = 40.0
    n_radial: int = 64  # uniform base panels on [0, rho_max]
    n_angular: int = 6  # uniform base panels on each polar range
    order: int = 16  # Gauss-Legendre points per panel
    rule: str = "gauss-legendre-composite"
    grading_ratio: float = 3.0
    min_angular_step: float = 1e-9

    def __post_init__(self):
        if not self.rho_max > 0:
            raise ConfigError("rho_max must be positive")
        if self.n_radial < 4 or self.n_angular < 4:
            raise ConfigError("node counts must be >= 4")
        if self.order < 4:
            raise ConfigError("panel order must be >= 4")
        if self.rule != "gauss-legendre-composite":
            raise ConfigError(f"unknown quadrature rule {self.rule!r}")

    def refined(self) -> "QuadratureSpec":
        """Same rule with the panel counts doubled."""
        return replace(self, n_radial=2 * self.n_radial, n_angular=2 * self.n_angular)

    def to_dict(self) -> dict:
        return {
            "rho_max": self.rho_max,
            "n_radial": self.n_radial,
            "n_angular": self.n_angular,
            "order": self.order,
            "rule": self.rule,
        }


@dataclass(frozen=True)
class Integral:
    """A quadrature value with its estimated truncated tail mass."""

    value: float
    tail: float = 0.0

    def __float__(self):
        return float(self.value)


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^n in R^{n+1} (S^0 has two points)."""
    return 2.0 * math.pi ** ((n + 1) / 2) / gamma((n + 1) / 2)


@lru_cache(maxsize=None)
def _gauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def composite_nodes(breaks, order: int):
    """Nodes and weights of composite Gauss-Legendre on sorted breakpoints."""
    b = np.unique(np.asarray(breaks, dtype=float))
    x, w = _gauss(order)
    lo, hi = b[:-1], b[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _graded(a: float, b: float, h0: float, ratio: float) -> list[float]:
    """Breakpoints between a and b, geometric from a with first step h0."""
    out, step, x = [a], h0, a
    while x + step < b:
        x += step
        out.append(x)
        step *= ratio
    out.append(b)
    return out


def _tail(G_last: float, G_prev: float, drho: float) -> float:
    if G_last == 0.0:
        return 0.0
    if G_prev <= 0.0 or G_last <= 0.0:
        return math.inf
    kappa = (math.log(G_prev) - math.log(G_last)) / drho
    return G_last / kappa if kappa > 0 else math.inf


def _check_finite(values, what):
    bad = ~np.isfinite(values)
    if np.any(bad):
        raise QuadratureError(f"non-finite integrand values in {what} ({int(bad.sum())} nodes)")


def radial_breaks(spec: QuadratureSpec, rho_max: float | None = None, extra=()) -> np.ndarray:
    rho_max = spec.rho_max if rho_max is None else rho_max
    base = np.linspace(0.0, rho_max, spec.n_radial + 1)
    h = base[1]
    near0 = [h / 2**k for k in range(1, 4)]
    pts = [*base, *near0, *(e for e in extra if 0 < e < rho_max)]
    return np.unique(np.asarray(pts))


def radial_integrate(f, params: ModelParams, spec: QuadratureSpec = QuadratureSpec(),
                     breakpoints=()) -> Integral:
    """omega_{N-1} * integral_0^rho_max f(rho) sinh^{N-1}(rho) d rho."""
    N = params.N
    nodes, weights = composite_nodes(radial_breaks(spec, extra=breakpoints), spec.order)
    vals = np.asarray(f(nodes), dtype=float) * np.ones_like(nodes)
    _check_finite(vals, "radial_integrate")
    G = vals * np.sinh(nodes) ** (N - 1) * sphere_area(N - 1)
    value = float(np.sum(G * weights))
    tail = _tail(abs(G[-1]), abs(G[-2]), nodes[-1] - nodes[-2])
    return Integral(value, tail)


# ---------------------------------------------------------------------------
# axial reduction


@dataclass(frozen=True)
class AxialLayout:
    """Anchors on a common geodesic, given by signed positions along it.

    ``axis`` is a Euclidean unit vector when the geodesic is a diameter
    through the origin (positions are then signed distances to 0), else None.
    """

    positions: tuple[float, ...]
    axis: np.ndarray | None = field(default=None, compare=False)


def axial_layout(points, N: int, include_origin: bool = False):
    """Map points onto one geodesic; returns (layout, anchor index per point).

    Coincident points share an anchor. Raises ConfigError when the points
    do not lie on one geodesic (through the origin if ``include_origin``).
    """
    pts = list(points)
    if include_origin:
        pts = pts + [BallPoint.origin(N)]
    nonzero = [q for q in pts if q.norm > 0]
    through_origin = True
    axis = None
    if nonzero:
        far = max(nonzero, key=lambda q: q.norm)
        axis = far.coords / far.norm
        for q in nonzero:
            cross = q.coords - np.dot(q.coords, axis) * axis
            if np.linalg.norm(cross) > COLLINEAR_TOL * max(q.norm, 1e-300) and q.norm > 0:
                through_origin = False
                break
    if through_origin:
        s = [q.rho * (1.0 if q.norm == 0 or np.dot(q.coords, axis) > 0 else -1.0)
             if q.norm > 0 else 0.0 for q in pts]
        if axis is None:
            axis = np.eye(N)[0]
    elif len(pts) == 2 and not include_origin:
        s = [0.0, hyp_distance(pts[0], pts[1])]
        axis = None
    else:
        # translate the first point to 0 and test collinearity there
        b0 = pts[0]
        moved = [translate(-b0, q.coords) for q in pts]
        ref = max(moved, key=np.linalg.norm)
        rn = np.linalg.norm(ref)
        for m in moved:
            mn = np.linalg.norm(m)
            if mn > 0 and np.linalg.norm(m - np.dot(m, ref) / rn * ref / rn) > COLLINEAR_TOL * mn:
                raise ConfigError(
                    "points do not lie on a common geodesic; only axially symmetric "
                    "configurations are supported"
                )
        s = [float(np.sign(np.dot(m, ref)) * hyp_distance(np.zeros(N), m)) if np.linalg.norm(m) > 0
             else 0.0 for m in moved]
        axis = None
    order = sorted(set(round(v, 12) for v in s))
    merged: list[float] = []
    for v in order:
        if not merged or v - merged[-1] > 1e-12:
            merged.append(v)
    index = [int(np.argmin([abs(v - m) for m in merged])) for v in s]
    if include_origin:
        index = index[:-1]
    return AxialLayout(tuple(merged), axis), index


@dataclass
class AxialGrid:
    """Quadrature nodes covering B^N for an axial configuration.

    For node i: ``t`` is the signed position of its foot on the axis,
    ``sh2`` = sinh^2(r/2) with r its distance to the axis, ``rho``/``cell``
    its distance to (and index of) the anchor whose cell contains it.
    """

    layout: AxialLayout
    t: np.ndarray
    sh2: np.ndarray
    rho: np.ndarray
    cell: np.ndarray
    weights: np.ndarray
    radial_id: np.ndarray
    last_ids: list  # per cell: (id of last radial node, id of the one before, drho)
    _dist_cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return self.t.size

    def distance_to(self, s: float) -> np.ndarray:
        """Distance from every node to the axis point at position s."""
        key = float(s)
        if key in self._dist_cache:
            return self._dist_cache[key]
        delta = self.t - s
        # cosh d - 1 = 2 sh2 cosh(delta) + 2 sinh^2(delta/2)
        half = np.sqrt(self.sh2 * np.cosh(delta) + np.sinh(0.5 * delta) ** 2)
        d = 2.0 * np.arcsinh(half)
        pos = self.layout.positions
        for k, p in enumerate(pos):
            if p == key:
                mask = self.cell == k
                d[mask] = self.rho[mask]
        self._dist_cache[key] = d
        return d

    def anchor_distance(self, k: int) -> np.ndarray:
        return self.distance_to(self.layout.positions[k])

    def integrate(self, values, what: str = "axial integral") -> Integral:
        vals = np.asarray(values, dtype=float)
        vals = np.broadcast_to(vals, self.t.shape)
        _check_finite(vals, what)
        contrib = vals * self.weights
        G = np.bincount(self.radial_id, weights=contrib, minlength=int(self.radial_id.max()) + 1)
        value = float(np.sum(G))
        tail = 0.0
        for last, prev, drho in self.last_ids:
            tail += _tail(abs(G[last]) / self._rw[last], abs(G[prev]) / self._rw[prev], drho)
        return Integral(value, tail)


def _asin_half(x):
    return 2.0 * np.arcsin(np.sqrt(np.clip(0.5 * x, 0.0, 1.0)))


def _theta_limit(rho, h):
    """arccos(min(1, tanh(h)/tanh(rho))) evaluated without cancellation."""
    if not math.isfinite(h) or rho <= h:
        return 0.0
    one_minus_q = math.sinh(rho - h) / (math.sinh(rho) * math.cosh(h))
    return float(_asin_half(one_minus_q))


def axial_grid(layout: AxialLayout, params: ModelParams,
               spec: QuadratureSpec = QuadratureSpec()) -> AxialGrid:
    N = params.N
    pos = layout.positions
    omega = sphere_area(N - 2)
    xg, wg = _gauss(spec.order)
    ts, sh2s, rhos, cells, ws, rids, rweights = [], [], [], [], [], [], []
    last_ids = []
    rid = 0
    for k, s in enumerate(pos):
        h_plus = 0.5 * (pos[k + 1] - s) if k + 1 < len(pos) else math.inf
        h_minus = 0.5 * (s - pos[k - 1]) if k > 0 else math.inf
        kinks = []
        base_h = spec.rho_max / spec.n_radial
        for h in (h_plus, h_minus):
            if h < spec.rho_max:
                kinks.extend(_graded(h, min(h + base_h, spec.rho_max), base_h / 3**6, 3.0))
        rnodes, rw = composite_nodes(radial_breaks(spec, extra=kinks), spec.order)
        first = rid
        for rho, wr in zip(rnodes, rw):
            th_lo = _theta_limit(rho, h_plus)
            th_hi = math.pi - _theta_limit(rho, h_minus)
            span = th_hi - th_lo
            if span <= 0:
                rid += 1
                rweights.append(1.0)
                continue
            sr = math.sinh(rho)
            h0 = max(min(0.25 / sr, span / (2 * spec.n_angular)), spec.min_angular_step)
            base = np.linspace(th_lo, th_hi, spec.n_angular + 1)
            left = th_lo + np.asarray(_graded(0.0, base[1] - base[0], h0, spec.grading_ratio))
            right = th_hi - np.asarray(_graded(0.0, base[-1] - base[-2], h0, spec.grading_ratio))
            breaks = np.unique(np.concatenate([base, left, right]))
            lo, hi = breaks[:-1], breaks[1:]
            half = 0.5 * (hi - lo)
            th = (0.5 * (hi + lo))[:, None] + half[:, None] * xg[None, :]
            wt = (half[:, None] * wg[None, :]).ravel()
            th = th.ravel()
            sin_t, cos_t = np.sin(th), np.cos(th)
            sinh_r = sr * sin_t
            cosh_r = np.sqrt(1.0 + sinh_r**2)
            tloc = np.arcsinh(sr * cos_t / cosh_r)
            vol = omega * sr ** (N - 1) * sin_t ** (N - 2) * wr
            ts.append(s + tloc)
            sh2s.append(0.5 * sinh_r**2 / (cosh_r + 1.0))
            rhos.append(np.full(th.size, rho))
            cells.append(np.full(th.size, k, dtype=np.int64))
            ws.append(vol * wt)
            rids.append(np.full(th.size, rid, dtype=np.int64))
            # volume weight per unit rho, for the tail estimate
            rweights.append(wr)
            rid += 1
        if rid - first >= 2:
            last_ids.append((rid - 1, rid - 2, rnodes[-1] - rnodes[-2]))
    grid = AxialGrid(
        layout=layout,
        t=np.concatenate(ts),
        sh2=np.concatenate(sh2s),
        rho=np.concatenate(rhos),
        cell=np.concatenate(cells),
        weights=np.concatenate(ws),
        radial_id=np.concatenate(rids),
        last_ids=last_ids,
    )
    grid._rw = np.asarray(rweights)
    return grid


def biaxial_integrate(F, b1: BallPoint, b2: BallPoint, params: ModelParams,
                      spec: QuadratureSpec = QuadratureSpec()) -> Integral:
    """Integral over B^N of F(d(x, b1), d(x, b2))."""
    D = hyp_distance(b1, b2)
    if D < 1e-12:
        return radial_integrate(lambda r: F(r, r), params, spec)
    grid = axial_grid(AxialLayout((0.0, D)), params, spec)
    return grid.integrate(F(grid.distance_to(0.0), grid.distance_to(D)), "biaxial_integrate")


def hyperbolic_ball_volume(N: int, R: float) -> float:
    """Closed-form volume of a geodesic ball of radius R (N = 2, 3, 4)."""
    if N == 2:
        return 2 * math.pi * (math.cosh(R) - 1)
    if N == 3:
        return math.pi * (math.sinh(2 * R) - 2 * R)
    if N == 4:
        c = math.cosh(R)
        return 2 * math.pi**2 * (c**3 / 3 - c + 2.0 / 3.0)
    raise ValueError("closed form implemented for N in {2, 3, 4}")
