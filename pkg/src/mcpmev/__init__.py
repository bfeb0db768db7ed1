"""MEV economics and deterministic block merging for chains with concurrent proposers."""

__version__ = "0.1.0"
