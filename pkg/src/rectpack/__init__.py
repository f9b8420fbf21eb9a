"""Minimum-perimeter packings of equal circles in rectangles."""

__version__ = "0.1.0"
