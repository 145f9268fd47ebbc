"""Two-bubble energy estimates for a semilinear problem on the Poincare ball."""

from .errors import ConfigError, NumericalError, QuadratureError, ShootingError
from .hypgeom import BallPoint, ModelParams

__version__ = "0.1.0"

__all__ = ["BallPoint", "ConfigError", "ModelParams", "NumericalError", "QuadratureError",
           "ShootingError", "__version__"]
