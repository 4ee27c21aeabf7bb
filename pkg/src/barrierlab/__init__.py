"""Exact and numerical one-dimensional tunnelling through parabolic and sech-squared barriers."""

__version__ = "0.1.0"
