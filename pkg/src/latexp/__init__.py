"""Exact computation of weak uniform Diophantine exponents of planar lattices."""

__version__ = "0.1.0"
