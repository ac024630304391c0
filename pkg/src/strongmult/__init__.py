"""Exact Hecke eigenvalue data, Selberg majorants and coincidence-set statistics
for pairs of GL(2) newforms."""

__version__ = "0.1.0"
