"""Killing tensors on the Euclidean plane."""

from ._core import *  # noqa: F401,F403
from ._core import NumericError, PreconditionError, Potential

KEPLER = "1/sqrt(x1^2 + x2^2)"

__all__ = [name for name in dir() if not name.startswith("_")]


