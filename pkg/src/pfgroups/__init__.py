"""Exact computations with finite quotients of profinite groups."""

__version__ = "0.1.0"
