"""Capacity, bound and simulation toolkit for wireless relay networks."""

__version__ = "0.1.0"
