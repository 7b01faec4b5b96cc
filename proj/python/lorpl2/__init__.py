"""Orthonormal Laurent polynomials in two variables."""

from ._core import *  # noqa: F401,F403
from ._core import Error, NumericalError, InvalidArgument, HypothesisViolation  # noqa: F401

__version__ = "0.1.0"
