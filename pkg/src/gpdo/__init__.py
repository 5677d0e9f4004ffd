"""Symbolic pseudo-differential calculus on the Heisenberg group and R^n."""

__version__ = "0.1.0"
