"""Differential geometry of curves on parametric surfaces and isometry checks."""
__version__ = "0.1.0"
