"""Numerical laboratory for chirped-pulse interferometry."""

__version__ = "0.1.0"
