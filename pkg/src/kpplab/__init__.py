"""Branching Brownian motion with absorption and half-plane KPP traveling waves."""
from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
