"""Penalized spline regression with reduced-smoothing and bias-corrected confidence bands."""

__version__ = "0.1.0"
