"""Desk-scale checks of the PARITY and PARITY-OR reductions to quantum linear systems."""

__version__ = "0.1.0"
