"""Finite-dimensional models of star-autonomous structure on Banach and Hilbert spaces."""

__version__ = "0.1.0"
