"""Differentially private combinatorial optimization with exact privacy audits."""

__version__ = "0.1.0"
