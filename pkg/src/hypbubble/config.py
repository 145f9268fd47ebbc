"""JSON run configuration.

A config file holds one block per object family plus run metadata; every
block is optional and falls back to the defaults below. Unknown keys are
rejected so typos fail loudly (exit code 2 from the CLI).
"""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bubble import SolverOptions
from .energy import CoefficientField
from .errors import ConfigError
from .estimates import LemmaSweepConfig
from .hypgeom import BallPoint, ModelParams
from .minmax import PathConfig
from .quad import QuadratureSpec

SCHEMA_VERSION = 1
OUTPUT_ENV = "HYPBUBBLE_OUTPUT"

DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "seed": 0,
    "rng": "PCG64",
    "output_dir": "out",
    "threads": 1,
    "params": {"N": 3, "p": 3.0, "lambda": 0.0},
    "coefficient": {"kind": "exp_defect", "C": 0.5, "delta": 3.5},
    "quadrature": {"rho_max": 40.0, "n_radial": 64, "n_angular": 6, "order": 16},
    "solver": {"grid_step": 0.005, "rho_cap": 25.0, "residual_tol": 1e-6},
    "spectrum": {"radii": [5.0, 10.0, 20.0, 40.0]},
    "energy": {"centers": [{"rho": 0.0}], "coeffs": [1.0]},
    "interaction": {"separations": [6.0, 8.0, 10.0, 12.0, 14.0], "eps": 0.1},
    "lemma_sweep": {
        "K": None, "alpha": 1.2, "alpha_prime": 1.1, "R": 8.0, "center_rhos": [12.0],
        "separations": [8.0, 10.0, 12.0], "t_step": 0.02, "placement": "same-side",
        "strict_regime": False,
    },
    "minmax": {"R2": 12.0, "x2_rho": None, "t_step": 0.02, "boundary_samples": 8,
               "alpha": 1.2, "alpha_prime": 1.1},
    "verify": {"criteria": list(range(1, 14))},
}


def _merge(base: dict, over: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if k not in base:
            raise ConfigError(f"unknown config key {where}{k!r}")
        if isinstance(base[k], dict) and k != "coefficient":
            if not isinstance(v, dict):
                raise ConfigError(f"config key {where}{k!r} must be an object")
            out[k] = _merge(base[k], v, f"{where}{k}.")
        else:
            out[k] = v
    return out


def _t_grid(step: float) -> list:
    if not 0 < step <= 1:
        raise ConfigError("t_step must lie in (0, 1]")
    n = int(round(1.0 / step))
    if abs(n * step - 1.0) > 1e-9:
        raise ConfigError("t_step must divide 1")
    return [float(t) for t in np.linspace(0.0, 1.0, n + 1)]


@dataclass
class RunConfig:
    data: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    def __post_init__(self):
        d = self.data
        if d["schema_version"] != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {d['schema_version']}")
        if d["rng"] != "PCG64":
            raise ConfigError("only the PCG64 generator is supported")
        if not isinstance(d["seed"], int) or d["seed"] < 0:
            raise ConfigError("seed must be a nonnegative integer")
        if not isinstance(d["threads"], int) or d["threads"] < 1:
            raise ConfigError("threads must be a positive integer")
        # build every object once so invalid configs fail before any computation
        self.params()
        self.coefficient()
        self.quadrature()
        self.solver()
        self.sweep()
        self.path()
        self.energy_terms()
        bad = [c for c in d["verify"]["criteria"] if c not in range(1, 14)]
        if bad:
            raise ConfigError(f"unknown acceptance criteria {bad}")

    @classmethod
    def from_dict(cls, over: dict | None = None) -> "RunConfig":
        return cls(_merge(DEFAULTS, over or {}))

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config root must be an object")
        return cls.from_dict(raw)

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def threads(self) -> int:
        return self.data["threads"]

    def output_dir(self, cli_value: str | None = None) -> Path:
        if cli_value:
            return Path(cli_value)
        env = os.environ.get(OUTPUT_ENV)
        return Path(env) if env else Path(self.data["output_dir"])

    def params(self) -> ModelParams:
        p = self.data["params"]
        return ModelParams(int(p["N"]), float(p["p"]), float(p["lambda"]))

    def coefficient(self) -> CoefficientField:
        c = dict(self.data["coefficient"])
        kind = c.pop("kind", "unit")
        if kind == "unit":
            return CoefficientField.unit()
        if kind == "exp_defect":
            return CoefficientField.exp_defect(float(c["C"]), float(c["delta"]))
        if kind == "radial_table":
            return CoefficientField.radial_table(c["grid"], c["values"])
        raise ConfigError(f"unknown coefficient kind {kind!r}")

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(**self.data["quadrature"])

    def solver(self) -> SolverOptions:
        return SolverOptions(**self.data["solver"])

    def sweep(self, strict: bool | None = None) -> LemmaSweepConfig:
        s = dict(self.data["lemma_sweep"])
        step = s.pop("t_step")
        if strict is not None:
            s["strict_regime"] = strict or s["strict_regime"]
        return LemmaSweepConfig(self.params(), self.coefficient(), t_grid=_t_grid(step), **s)

    def path(self) -> PathConfig:
        m = dict(self.data["minmax"])
        step = m.pop("t_step")
        return PathConfig(self.params(), self.coefficient(), t_grid=_t_grid(step), **m)

    def energy_terms(self):
        e = self.data["energy"]
        N = self.params().N
        if len(e["centers"]) != len(e["coeffs"]) or not e["centers"]:
            raise ConfigError("energy block needs matching, nonempty centers and coeffs")
        terms = []
        for c, k in zip(e["centers"], e["coeffs"]):
            direction = np.asarray(c.get("direction", np.eye(N)[0]), dtype=float)
            if direction.shape != (N,):
                raise ConfigError(f"center direction must have {N} components")
            terms.append((BallPoint.from_polar(float(c["rho"]), direction), float(k)))
        return terms
