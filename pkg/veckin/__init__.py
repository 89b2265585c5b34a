"""Entropy-conserving and entropy-stable finite-volume schemes for vector-kinetic models."""

__version__ = "1.0.0"
