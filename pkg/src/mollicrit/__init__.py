"""Numerical toolkit for mollified critical-line proportion bounds."""

__version__ = "0.1.0"
