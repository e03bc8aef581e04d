"""Exact and numeric verification engine for secondary CR invariants."""

__version__ = "0.1.0"
