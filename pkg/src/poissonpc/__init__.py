"""Numerical toolkit for metric Poissonian pair correlation."""

__version__ = "0.1.0"
