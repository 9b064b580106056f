"""Tropical moduli of curves with Teichmueller markings, at desk scale."""

__version__ = "0.1.0"
