"""Radial ground state of -Lap w - lam w = w^p on B^N, and its energy levels.

The radial ODE is

    w'' + (N-1) coth(rho) w' + lam w + w^p = 0,   w'(0) = 0,

solved by shooting on s = w(0). A trajectory that crosses zero overshoots;
one whose logarithmic slope w'/w turns back up towards the slow root of
r^2 + (N-1) r + lam = 0 undershoots. Bisection on s separates the two.
Beyond the last trusted node the profile is continued by a fitted
exponential tail amplitude * exp(-exponent * rho).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly

from .errors import ConfigError, NumericalError, ShootingError
from .hypgeom import ModelParams
from .quad import QuadratureSpec, radial_integrate

log = logging.getLogger(__name__)

RHO_START = 1e-6


@dataclass(frozen=True)
class SolverOptions:
    residual_tol: float = 1e-6
    decay_tol: float = 1e-3
    grid_step: float = 0.005
    rho_end: float = 60.0
    divergence_tol: float = 1e-6  # relative spread of the bracketing shots
    rho_cap: float = 25.0
    tail_window: float = 5.0
    max_iter: int = 200
    rtol: float = 1e-13

    def __post_init__(self):
        if not 0 < self.grid_step <= 0.1:
            raise ConfigError("grid_step must lie in (0, 0.1]")
        if not self.tail_window + 2 < self.rho_cap < self.rho_end:
            raise ConfigError("need tail_window + 2 < rho_cap < rho_end")
        for name in ("residual_tol", "decay_tol", "divergence_tol", "rtol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be positive")


@dataclass(frozen=True, eq=False)
class RadialProfile:
    params: ModelParams
    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    tail_amplitude: float
    tail_exponent: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("grid", "values", "derivs"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        second = _second_derivative(self.params, self.grid, self.values, self.derivs)
        object.__setattr__(self, "_poly", BPoly.from_derivatives(
            self.grid, np.column_stack([self.values, self.derivs, second])))
        object.__setattr__(self, "_dpoly", self._poly.derivative())

    @property
    def w0(self) -> float:
        return float(self.values[0])

    @property
    def rho_max(self) -> float:
        return float(self.grid[-1])

    def __call__(self, rho):
        return self.value(rho)

    def value(self, rho):
        """w(rho): quintic Hermite inside the grid, exponential tail outside."""
        rho = np.asarray(rho, dtype=float)
        inside = rho <= self.rho_max
        out = np.empty(rho.shape)
        out[inside] = self._poly(rho[inside])
        out[~inside] = self.tail_amplitude * np.exp(-self.tail_exponent * rho[~inside])
        return float(out) if out.ndim == 0 else out

    def derivative(self, rho):
        rho = np.asarray(rho, dtype=float)
        inside = rho <= self.rho_max
        out = np.empty(rho.shape)
        out[inside] = self._dpoly(rho[inside])
        out[~inside] = (-self.tail_exponent * self.tail_amplitude
                        * np.exp(-self.tail_exponent * rho[~inside]))
        return float(out) if out.ndim == 0 else out

    def second_derivative(self, rho):
        return self._dpoly.derivative()(np.asarray(rho, dtype=float))

    def scaled(self, factor: float) -> "RadialProfile":
        return RadialProfile(self.params, self.grid, factor * self.values, factor * self.derivs,
                             factor * self.tail_amplitude, self.tail_exponent,
                             dict(self.diagnostics, scaled_by=factor))

    def ode_residual(self, rho) -> np.ndarray:
        """w'' + (N-1) coth(rho) w' + lam w + w^p evaluated on the interpolant."""
        P = self.params
        rho = np.asarray(rho, dtype=float)
        w = self.value(rho)
        return (self.second_derivative(rho) + (P.N - 1) * self.derivative(rho) / np.tanh(rho)
                + P.lam * w + np.abs(w) ** (P.p - 1) * w)

    # serialization: CSV table plus a JSON header

    def header(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "w0": self.w0,
            "rho_max": self.rho_max,
            "tail_amplitude": self.tail_amplitude,
            "tail_exponent": self.tail_exponent,
            "decay_rate": self.params.decay_rate,
            "diagnostics": self.diagnostics,
        }

    def save(self, stem) -> tuple[Path, Path]:
        stem = Path(stem)
        csv_path, json_path = stem.with_suffix(".csv"), stem.with_suffix(".json")
        table = np.column_stack([self.grid, self.values, self.derivs])
        np.savetxt(csv_path, table, delimiter=",", header="rho,w,dw", comments="", fmt="%.17g")
        json_path.write_text(json.dumps(self.header(), indent=2, sort_keys=True) + "\n")
        return csv_path, json_path

    @classmethod
    def load(cls, stem) -> "RadialProfile":
        stem = Path(stem)
        head = json.loads(stem.with_suffix(".json").read_text())
        table = np.loadtxt(stem.with_suffix(".csv"), delimiter=",", skiprows=1)
        pr = head["params"]
        params = ModelParams(int(pr["N"]), float(pr["p"]), float(pr["lambda"]))
        return cls(params, table[:, 0], table[:, 1], table[:, 2],
                   head["tail_amplitude"], head["tail_exponent"], head.get("diagnostics", {}))


def _second_derivative(params, rho, w, dw):
    rho = np.asarray(rho, dtype=float)
    out = np.empty_like(rho)
    at0 = rho == 0
    f0 = params.lam * w + np.abs(w) ** (params.p - 1) * w
    # at the pole coth(rho) w' -> w''(0), so N w''(0) = -(lam w + w^p)
    out[at0] = -f0[at0] / params.N
    r = rho[~at0]
    out[~at0] = -(params.N - 1) * dw[~at0] / np.tanh(r) - f0[~at0]
    return out


def _rhs(params):
    N, p, lam = params.N, params.p, params.lam

    def f(rho, y):
        w, dw = y
        return [dw, -(N - 1) * dw / math.tanh(rho) - lam * w - abs(w) ** (p - 1) * w]

    return f


def _series_start(params, s):
    k = s * (params.lam + s ** (params.p - 1)) / params.N
    return [s - 0.5 * k * RHO_START**2, -k * RHO_START]


def _shoot(params, s, opts: SolverOptions, dense=False, t_eval=None):
    """Integrate from the pole; returns (+1 overshoot | -1 undershoot, solution)."""
    mid = -0.5 * (params.decay_rate + params.slow_rate)

    def crossing(rho, y):
        return y[0]

    crossing.terminal, crossing.direction = True, -1

    def turning(rho, y):
        # log slope rising back above the midpoint between the two rates
        return y[1] - mid * y[0]

    turning.terminal, turning.direction = True, 1

    def rising(rho, y):
        return y[1]

    rising.terminal, rising.direction = True, 1

    sol = solve_ivp(_rhs(params), (RHO_START, opts.rho_end), _series_start(params, s),
                    method="DOP853", rtol=opts.rtol, atol=1e-300,
                    events=[crossing, turning, rising], dense_output=dense, t_eval=t_eval)
    if sol.status == -1:
        raise ShootingError(f"integration failed for s = {s}: {sol.message}")
    if sol.t_events[0].size:
        return 1, sol
    if sol.t_events[1].size or sol.t_events[2].size:
        return -1, sol
    w, dw = sol.y[:, -1]
    return (-1 if dw > mid * w else 1), sol


def _bracket(params, opts):
    lo, hi = None, None
    s = 1.0
    for _ in range(200):
        kind, _ = _shoot(params, s, opts)
        if kind > 0:
            hi = s
            if lo is not None:
                break
            s /= 2.0
        else:
            lo = s
            if hi is not None:
                break
            s *= 2.0
    if lo is None or hi is None:
        raise ShootingError("could not bracket the shooting parameter", (lo, hi))
    return lo, hi


def solve_ground_state(params: ModelParams, opts: SolverOptions = SolverOptions()) -> RadialProfile:
    """Positive radial solution decaying like exp(-c(N, lam) rho)."""
    if params.uniqueness_flag:
        log.warning("N = 2 and lambda > 2(p+1)/(p+3)^2: uniqueness of the bubble is not "
                    "guaranteed; returning the first fast-decay solution")
    lo, hi = _bracket(params, opts)
    it = 0
    while hi - lo > 1e-12 * hi:
        # run all the way down to adjacent floats for the longest trusted range
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        kind, _ = _shoot(params, mid, opts)
        if kind > 0:
            hi = mid
        else:
            lo = mid
        it += 1
        if it > opts.max_iter:
            raise ShootingError("bisection did not converge", (lo, hi))
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        kind, _ = _shoot(params, mid, opts)
        lo, hi = (lo, mid) if kind > 0 else (mid, hi)
        it += 1

    grid = np.arange(0.0, opts.rho_cap + opts.grid_step / 2, opts.grid_step)
    t_eval = np.concatenate([[RHO_START], grid[1:]])
    _, sol_lo = _shoot(params, lo, opts, t_eval=t_eval)
    _, sol_hi = _shoot(params, hi, opts, t_eval=t_eval)
    n = min(sol_lo.t.size, sol_hi.t.size)
    w_lo, w_hi = sol_lo.y[0, :n], sol_hi.y[0, :n]
    spread = np.abs(w_hi - w_lo) / np.abs(0.5 * (w_lo + w_hi))
    bad = np.nonzero((spread > opts.divergence_tol) | (w_lo <= 0) | (w_hi <= 0))[0]
    n_ok = bad[0] if bad.size else n
    if grid[n_ok - 1] < opts.tail_window + 2.0:
        raise NumericalError(
            f"shooting trajectories separate already at rho = {grid[n_ok - 1]:.2f}")
    grid = grid[:n_ok]
    w = 0.5 * (w_lo[:n_ok] + w_hi[:n_ok])
    dw = 0.5 * (sol_lo.y[1, :n_ok] + sol_hi.y[1, :n_ok])
    w[0], dw[0] = 0.5 * (lo + hi), 0.0

    # least-squares line through log w on the last tail_window units
    window = grid >= grid[-1] - opts.tail_window
    slope, intercept = np.polyfit(grid[window], np.log(w[window]), 1)
    exponent = -float(slope)
    amplitude = math.exp(intercept)
    seam = amplitude * math.exp(-exponent * grid[-1]) / w[-1]
    if abs(seam - 1) > 1e-6:
        log.debug("tail seam mismatch %.3g; pinning amplitude to the last node", seam - 1)
        amplitude = w[-1] * math.exp(exponent * grid[-1])
    logslope_end = dw[-1] / w[-1]
    diagnostics = {
        "bracket": [lo, hi],
        "iterations": it,
        "logslope_at_rho_max": logslope_end,
        "decay_rate": params.decay_rate,
        "fitted_exponent": exponent,
        "seam_mismatch": seam - 1,
        "uniqueness_flag": params.uniqueness_flag,
    }
    if abs(logslope_end + params.decay_rate) > opts.decay_tol:
        raise NumericalError(
            f"log slope {logslope_end:.6f} at rho_max misses -c = {-params.decay_rate:.6f}")
    profile = RadialProfile(params, grid, w, dw, amplitude, exponent, diagnostics)
    interior = profile.grid[1:-1]
    resid = float(np.max(np.abs(profile.ode_residual(interior))))
    profile.diagnostics["max_residual"] = resid
    if resid > opts.residual_tol:
        raise NumericalError(f"ODE residual {resid:.3g} above tolerance {opts.residual_tol}")
    return profile


@dataclass(frozen=True)
class NormReport:
    A: float
    norm_sq_lambda: float
    discrepancy: float


def norm_A(W: RadialProfile, spec: QuadratureSpec = QuadratureSpec(),
           stale_tol: float = 1e-4) -> NormReport:
    """A = int w^{p+1} dV, cross-checked against ||w||_lambda^2."""
    P = W.params
    A = radial_integrate(lambda r: W.value(r) ** (P.p + 1), P, spec,
                         breakpoints=[W.rho_max]).value
    nsq = radial_integrate(lambda r: W.derivative(r) ** 2 - P.lam * W.value(r) ** 2, P, spec,
                           breakpoints=[W.rho_max]).value
    if not A > 0:
        raise NumericalError("nonpositive A")
    disc = abs(nsq - A) / A
    if disc > stale_tol:
        raise NumericalError(f"stale profile: ||w||^2 and int w^(p+1) differ by {disc:.3g}")
    return NormReport(A, nsq, disc)


@dataclass(frozen=True)
class EnergyLevels:
    A: float
    S1: float
    S2: float
    Sm: tuple[float, ...]  # S_1 ... S_{m_max}


def energy_levels(A: float, params: ModelParams, m_max: int = 2) -> EnergyLevels:
    if not A > 0:
        raise ConfigError("A must be positive")
    if m_max < 2:
        raise ConfigError("m_max must be >= 2")
    e = (params.p - 1) / (params.p + 1)
    S1 = A**e
    Sm = tuple(m**e * S1 for m in range(1, m_max + 1))
    return EnergyLevels(A, S1, Sm[1], Sm)
