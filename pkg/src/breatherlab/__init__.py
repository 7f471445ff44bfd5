"""Breathers of the focusing NLS equation, their Lax-pair eigenfunctions and
linearized solutions, with numerical verification tools."""

__version__ = "0.1.0"
