"""Replacement-freeness workbench for process calculi."""

__version__ = "1.0.0"
