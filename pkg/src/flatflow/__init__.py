"""Certified computations for badly approximable flows, torus covers and train tracks."""

__version__ = "0.1.0"
