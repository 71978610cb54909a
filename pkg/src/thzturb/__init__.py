"""Atmospheric-turbulence channel models for terahertz UAV MIMO links."""

__version__ = "0.1.0"
