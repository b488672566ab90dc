"""Alternating sign matrices, their TSSCPP dimer model and the GOE edge limit."""

__version__ = "0.1.0"
