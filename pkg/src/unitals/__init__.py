"""Hermitian unitals over finite fields and their subunitals."""

__version__ = "0.1.0"
