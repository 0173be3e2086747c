"""Numerical toolkit for Laplace transforms of cone-supported ultradistributions."""

__version__ = "0.1.0"
