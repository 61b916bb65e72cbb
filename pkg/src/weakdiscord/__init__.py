"""Quantum discord and weak quantum discord for bipartite states."""

__version__ = "0.1.0"
