"""Numerical structure theory of polar representations from symmetric pairs."""

__version__ = "0.1.0"
