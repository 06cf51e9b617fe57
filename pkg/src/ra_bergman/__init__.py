"""Numerical toolkit for real-analytic Bergman spaces."""

__version__ = "0.1.0"
