"""Numerical laboratory for Almgren-type frequency functions."""

__version__ = "0.1.0"
