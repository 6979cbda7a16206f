"""Verification tooling for intersection-closed set families."""

__version__ = "0.1.0"
