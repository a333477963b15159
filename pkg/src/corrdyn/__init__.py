"""Dynamics of (2:2) holomorphic correspondences mating quadratic maps with C2*C3."""

__version__ = "0.1.0"
