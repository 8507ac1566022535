"""Sparse wideband tapped-delay-line array design."""

from ._sparsewb import *  # noqa: F401,F403
from ._sparsewb import __doc__  # noqa: F401

__version__ = "0.1.0"
