"""Renormalized mean-curvature-flow laboratory over generalized cylinders."""

from _cylflow import *  # noqa: F401,F403
from _cylflow import __version__  # noqa: F401
