"""Correlation clustering by Potts-energy minimization."""

from corrclust._backend import AVAILABLE, BACKEND

__version__ = "0.1.0"

__all__ = ["AVAILABLE", "BACKEND", "__version__"]
