"""LGL spectral calculus and split-form DG spectral element solver for linear hyperbolic systems."""

from .config import RunConfig, parse_config
from .errors import (ConfigError, NonConvergence, NonPositiveJacobian, NumericalError, ParseError,
                     SplitDGError, ValidationError)
from .geometry import build_box_mesh
from .quadrature import build_lgl
from .solver import FORMS, make_state, residual, run

__all__ = [
    "FORMS", "ConfigError", "NonConvergence", "NonPositiveJacobian", "NumericalError",
    "ParseError", "RunConfig", "SplitDGError", "ValidationError", "build_box_mesh", "build_lgl",
    "make_state", "parse_config", "residual", "run",
]
