"""Algebraic starscapes: integer polynomial families and the hyperbolic geometry of their roots."""

__version__ = "0.1.0"
