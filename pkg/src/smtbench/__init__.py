"""Exact verification workbench for standard monomial bases on Bott-Samelson and Richardson varieties."""

__version__ = "0.1.0"
