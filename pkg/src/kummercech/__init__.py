"""Exact Cech and group cohomology for Kummer covers of log points."""

__version__ = "0.1.0"
