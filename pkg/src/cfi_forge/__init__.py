"""cfi-forge: compressed CFI instance generation and exact game solving."""

__version__ = "0.1.0"
