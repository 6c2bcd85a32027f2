"""Operator-ordering laboratory for Trotterized unitary coupled-cluster ansatze."""

__version__ = "0.1.0"
