"""Driven, dissipative two-resonator + atom model: steady states and tripartite entanglement."""

__version__ = "0.1.0"
