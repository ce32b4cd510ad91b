"""Degree distributions restricted to selected vertices of growing scale-free graphs."""

__version__ = "0.1.0"
