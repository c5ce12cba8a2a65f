"""Exact computations with irregular constant sheaves, Stokes local systems
and barcodes over the finite Novikov ring."""

__version__ = "0.1.0"
