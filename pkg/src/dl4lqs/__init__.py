"""Description logic knowledge bases decided through a set-theoretic fragment."""

__version__ = "0.1.0"
