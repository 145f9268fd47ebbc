"""Closed-form geometry of the Poincaré ball model B^N.

Points are stored in Euclidean ball coordinates. The metric is
(2 / (1 - |x|^2))^2 |dx|^2, the distance to the origin is
rho = log((1 + r) / (1 - r)) with r = |x|, and the hyperbolic translation
tau_b is the isometry sending 0 to b.

Points further out than ``MAX_NORM`` are rejected: 1 - |x|^2 loses too many
digits there. Far points should be built with :meth:`BallPoint.from_polar`,
which also remembers the exact radial coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

MAX_NORM = 1.0 - 1e-12
# largest radial coordinate representable under MAX_NORM
MAX_RHO = 2.0 * math.atanh(MAX_NORM)


@dataclass(frozen=True)
class ModelParams:
    """Dimension N, exponent p and spectral parameter lambda."""

    N: int
    p: float
    lam: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ConfigError(f"dimension N must be an integer >= 2, got {self.N}")
        if not self.p > 1:
            raise ConfigError(f"exponent p must exceed 1, got {self.p}")
        if self.N >= 3:
            crit = (self.N + 2) / (self.N - 2)
            if not self.p < crit:
                raise ConfigError(
                    f"p = {self.p} is not subcritical: need p < (N+2)/(N-2) = {crit:g}"
                )
        if not self.lam < self.spectral_bottom:
            raise ConfigError(
                f"lambda = {self.lam} must lie below the bottom of the spectrum "
                f"(N-1)^2/4 = {self.spectral_bottom:g}"
            )

    @property
    def spectral_bottom(self) -> float:
        return (self.N - 1) ** 2 / 4.0

    @property
    def decay_rate(self) -> float:
        """c(N, lambda): exponential decay rate of the ground state."""
        return 0.5 * (self.N - 1 + math.sqrt((self.N - 1) ** 2 - 4.0 * self.lam))

    @property
    def slow_rate(self) -> float:
        """The other root of r^2 + (N-1) r + lambda = 0 (as a decay rate)."""
        return 0.5 * (self.N - 1 - math.sqrt((self.N - 1) ** 2 - 4.0 * self.lam))

    @property
    def uniqueness_flag(self) -> bool:
        """True in the N = 2 regime where uniqueness of the bubble is not guaranteed."""
        return self.N == 2 and self.lam > 2.0 * (self.p + 1) / (self.p + 3) ** 2

    def to_dict(self) -> dict:
        return {"N": self.N, "p": self.p, "lambda": self.lam}


@dataclass(frozen=True, eq=False)
class BallPoint:
    coords: np.ndarray
    # exact distance to the origin when the point was built from it
    exact_rho: float | None = field(default=None, compare=False)

    def __post_init__(self):
        x = np.array(self.coords, dtype=float).reshape(-1)
        x.setflags(write=False)
        object.__setattr__(self, "coords", x)
        if x.size < 1 or not np.all(np.isfinite(x)):
            raise ConfigError("ball point needs finite coordinates")
        if self.exact_rho is None and np.linalg.norm(x) > MAX_NORM:
            raise ConfigError(f"point {x} lies outside the ball (|x| > 1 - 1e-12)")

    @classmethod
    def origin(cls, N: int) -> "BallPoint":
        return cls(np.zeros(N), exact_rho=0.0)

    @classmethod
    def from_polar(cls, rho: float, direction) -> "BallPoint":
        """Point at hyperbolic distance ``rho`` from 0 along ``direction``."""
        u = np.asarray(direction, dtype=float)
        n = np.linalg.norm(u)
        if n == 0:
            raise ConfigError("direction must be nonzero")
        if rho < 0:
            raise ConfigError("rho must be nonnegative")
        if rho > MAX_RHO:
            raise ConfigError(f"rho = {rho} exceeds the representable range {MAX_RHO:.3f}")
        return cls(ball_radius(rho) * u / n, exact_rho=float(rho))

    @property
    def dim(self) -> int:
        return self.coords.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    @property
    def rho(self) -> float:
        if self.exact_rho is not None:
            return self.exact_rho
        return radial_coord(self.norm)

    def __neg__(self) -> "BallPoint":
        return BallPoint(-self.coords, exact_rho=self.exact_rho)

    def __repr__(self):
        return f"BallPoint({np.array2string(self.coords, precision=6)}, rho={self.rho:.6g})"


def _coords(x) -> np.ndarray:
    if isinstance(x, BallPoint):
        return x.coords
    x = np.asarray(x, dtype=float)
    if np.any(np.sum(x * x, axis=-1) > MAX_NORM**2):
        raise ConfigError("point outside the ball (|x| > 1 - 1e-12)")
    return x


def metric_factor(x) -> float:
    """Conformal factor 2 / (1 - |x|^2)."""
    x = _coords(x)
    r2 = np.sum(x * x, axis=-1)
    return 2.0 / ((1.0 - np.sqrt(r2)) * (1.0 + np.sqrt(r2)))


def radial_coord(r):
    """Hyperbolic distance to the origin of a point with Euclidean norm r."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r >= 1):
        raise ConfigError("radial_coord needs 0 <= r < 1")
    out = 2.0 * np.arctanh(r)
    return float(out) if out.ndim == 0 else out


def ball_radius(rho):
    """Inverse of :func:`radial_coord`: r = tanh(rho / 2)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ConfigError("ball_radius needs rho >= 0")
    out = np.tanh(0.5 * rho)
    return float(out) if out.ndim == 0 else out


def hyp_distance(x, y):
    """Hyperbolic distance; broadcasts over leading axes of plain arrays."""
    if isinstance(x, BallPoint) and isinstance(y, BallPoint):
        if x.exact_rho is not None and y.exact_rho is not None:
            # same ray or opposite rays: exact radial arithmetic
            nx, ny = x.norm, y.norm
            if nx == 0 or ny == 0:
                return abs(x.rho - y.rho) if nx or ny else 0.0
            c = float(np.dot(x.coords, y.coords) / (nx * ny))
            if abs(c - 1.0) < 1e-15:
                return abs(x.rho - y.rho)
            if abs(c + 1.0) < 1e-15:
                return x.rho + y.rho
    a, b = _coords(x), _coords(y)
    diff2 = np.sum((a - b) ** 2, axis=-1)
    na, nb = np.sqrt(np.sum(a * a, axis=-1)), np.sqrt(np.sum(b * b, axis=-1))
    denom = (1 - na) * (1 + na) * (1 - nb) * (1 + nb)
    # cosh d = 1 + z  <=>  d = 2 asinh(sqrt(z / 2)), stable for small d
    z = 2.0 * diff2 / denom
    out = 2.0 * np.arcsinh(np.sqrt(0.5 * z))
    return float(out) if np.ndim(out) == 0 else out


def translate(b, x):
    """tau_b(x), the hyperbolic translation taking 0 to b."""
    bb, xx = _coords(b), _coords(x)
    b2 = np.sum(bb * bb, axis=-1)
    x2 = np.sum(xx * xx, axis=-1)
    xb = np.sum(xx * bb, axis=-1)
    num = (1 - b2)[..., None] * xx + (x2 + 2 * xb + 1)[..., None] * bb
    den = b2 * x2 + 2 * xb + 1
    out = num / den[..., None]
    if isinstance(x, BallPoint) and out.ndim == 1:
        return BallPoint(out)
    return out


def cos_angle(d1, d2, D):
    """Cosine of the angle opposite side D in a hyperbolic triangle with sides d1, d2.

    Uses half-angle products instead of the raw law of cosines so that
    nearly flat triangles keep their digits. Clamped to [-1, 1].
    """
    d1, d2, D = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (d1, d2, D)))
    denom = np.sinh(d1) * np.sinh(d2)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        near_zero = 1.0 - 2.0 * np.sinh(0.5 * (D + d1 - d2)) * np.sinh(0.5 * (D - d1 + d2)) / denom
        near_pi = -1.0 + 2.0 * np.sinh(0.5 * (d1 + d2 + D)) * np.sinh(0.5 * (d1 + d2 - D)) / denom
    out = np.where(near_zero >= 0, near_zero, near_pi)
    out = np.where(denom > 0, out, 1.0)
    out = np.clip(out, -1.0, 1.0)
    return float(out) if out.ndim == 0 else out


def gradient_angle_cos(x, b1, b2) -> float:
    """cos of the angle at x between the geodesics towards b1 and b2.

    This is <grad d(., b1), grad d(., b2)> in the hyperbolic metric.
    """
    d1, d2 = hyp_distance(x, b1), hyp_distance(x, b2)
    if d1 == 0 or d2 == 0:
        raise ConfigError("degenerate triangle: x coincides with a center")
    return cos_angle(d1, d2, hyp_distance(b1, b2))
